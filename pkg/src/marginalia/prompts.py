"""Prompt templates and rendering.

Template bodies are versioned assets: the instruction blocks are stored
verbatim so deployed prompt text is auditable, with an input section of
``{name}`` placeholders appended per template. Substitution is single-pass,
so braces inside bound values are never re-interpreted as placeholders.

Response-format guidance is written in prose (no literal JSON braces) to
keep the placeholder scan unambiguous.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import BindingError, NotFoundError

_PLACEHOLDER_RE = re.compile(r"\{([a-z][a-z0-9_]*)\}")
_NONCE_RE = re.compile(r"\[regeneration nonce: (\d+)\]")

_AFFINITY_BODY = """\
Analyze the relationship between a primary discussion card and a collection of related cards.

1. Relevance Analysis:
   - Compare the content of the primary card with each card in the collection
   - Calculate relevance scores
   - Generate a ranked order based on content relevance
   - Ensure the primary card's original position is preserved at the top

2. Shared affinity types Identification:
   - For each comparison, identify a affinity type (1-2 words) that captures the conceptual relationship
   - Affinity type should reflect the nature of the connection between cards
   - Use "none" if no meaningful relationship is found

3. Relevance Classification:
   - Categorize relationships as: high, medium, or low
   - Assign percentage scores to indicate relative strength
   - Provide specific themes for each relationship"""

_INSPIRING_QUESTION_BODY = """\
Generate a thought-provoking discussion question based on the provided content, keywords, and their descriptions. The question should align with one of these discussion styles:

Discussion Styles:
1. Similarity Focus
   - Encourage students to identify shared perspectives
   - Help them build on common ground
   - Foster collaborative thinking

2. Contrastive Focus
   - Promote respectful debate of different viewpoints
   - Encourage critical analysis of opposing arguments
   - Develop skills in defending positions

3. Complementary Focus
   - Guide students to find ways ideas can enhance each other
   - Identify how different perspectives fill knowledge gaps
   - Explore how combining viewpoints creates deeper understanding

Requirements:
- Question should be clear and engaging
- Length: 20-30 words
- Must directly relate to provided keywords and content
- Should naturally lead to the specified style of discussion"""

_EVIDENCE_BODY = """\
Identify three pieces of evidence from the article to help students engage with the discussion question.

For each piece of evidence:
1. Extract a key concept (1-2 words) that connects the evidence to the question
2. Provide the exact text from the article that supports this concept
3. Maintain all original formatting, including punctuation and capitalization

Purpose:
- Support students in developing well-reasoned responses to the discussion question
- Help students connect specific parts of the text to their arguments
- Enable evidence-based participation in class discussions"""

_DISCUSSION_OVERVIEW_BODY = """\
Analyze the provided materials which include:
1. Original articles
2. Student discussions and posts about these articles
3. Individual user's comments

Your analysis should:

1. Discussion Topic Analysis:
   - Identify key discussion topics and convert them to 1-2 word keywords
   - Summarize each user's specific contributions under these topics
   - Provide strategic suggestions for deepening these discussions

2. Individual Engagement Analysis:
   - Review the user's comments to identify:
     a) Topics of High Engagement: Extract keywords from sections with active participation
     b) Topics of Low Engagement: Identify keywords for less-engaged sections

3. Community Focus Analysis:
   - Identify "hotSpot" sections that generated significant discussion
   - For each hotSpot: Create concise keywords (1-2 words)"""

_DISCUSSION_ANALYSIS_BODY = """\
Analyze a student's discussion contribution for a specific paragraph in the article.

Input provided:
1. The student's comment on a specific paragraph and paragraph index
2. The original paragraph text and its index

Please provide:
1. Keywords Analysis (1-3 keywords)
2. Discussion Summary: Start with "You discussed..." (limit: 30 words)
3. Engagement Suggestions: Start with "You could..." (limit: 30 words)"""

_KEYWORD_HIGHLIGHTING_BODY = """\
Analyze two discussion cards to recommend the most effective discussion approach.

Task:
1. Discussion Style Analysis:
   - Calculate percentage distribution across three potential discussion styles:
     * Similarity-based, Contrastive, and Complementary Discussion
   - Ensure percentages total 100

2. Evidence Selection:
   - For each relationship type with non-zero percentage:
     * Extract brief quotes (1-3 words) from original text
     * Select from card1.content and card2.content only

3. Discussion Direction:
   - For each non-zero relationship:
     * Provide a discussion aspect (1-10 words)"""

_SUMMARIZATION_BODY = """\
Generate a concise summary of the nested object's content.

Task:
Create 1-3 bullet-point summaries that:
- Capture the main ideas from the object's content field
- Each summary should not exceed 30 words
- Provide fewer points for shorter content
- Generate fresh summaries when regeneration is requested"""

_ASPECT_EXTRACTION_BODY = """\
Summarize three keywords and their extended descriptions of two nested objects based on the article.
- Keywords should be 1-2 words
- Extended descriptions should not exceed 20 words
- Each keyword should have corresponding original text in card1 and card2
- Original text must be in card1.content and card2.content, not in children
- Preserve original formatting including punctuation and capitalization"""


@dataclass(frozen=True)
class PromptTemplate:
    template_id: str
    body: str

    @property
    def placeholders(self) -> frozenset[str]:
        return frozenset(_PLACEHOLDER_RE.findall(self.body))


TEMPLATES: dict[str, PromptTemplate] = {
    t.template_id: t
    for t in (
        PromptTemplate(
            "affinity",
            _AFFINITY_BODY
            + """

Primary card:
{primary_card}

Card collection:
{cards}

Respond with a single JSON object. Its key "entries" holds one object per collection card, in the collection order, each with keys "post_id", "affinity_type", "relevance_score" (a number from 0 to 1), and optionally "theme" and "percentage".""",
        ),
        PromptTemplate(
            "inspiring_question",
            _INSPIRING_QUESTION_BODY
            + """

Discussion style: {style}

Keyword from card 1: {keyword_a} - {description_a}
Keyword from card 2: {keyword_b} - {description_b}

card1.content:
{content_a}

card2.content:
{content_b}

Respond with a single JSON object with the key "question".""",
        ),
        PromptTemplate(
            "evidence",
            _EVIDENCE_BODY
            + """

Discussion question: {question}

Article excerpts:
{chunks}

{task}

Respond with a single JSON object. Its key "evidence" holds exactly three objects, each with keys "key_concept", "excerpt", and "connection".""",
        ),
        PromptTemplate(
            "discussion_overview",
            _DISCUSSION_OVERVIEW_BODY
            + """

Original article:
{article}

Student discussions:
{discussions}

Individual user's comments:
{comments}

Respond with a single JSON object. Its key "hot_spots" holds one object per listed hotSpot section, each with keys "paragraph_index" (integer) and "keyword".""",
        ),
        PromptTemplate(
            "discussion_analysis",
            _DISCUSSION_ANALYSIS_BODY
            + """

Student comment:
{comment}

Paragraph index: {paragraph_index}

Paragraph text:
{paragraph_text}

Respond with a single JSON object with keys "keywords" (a list of 1-3 strings), "summary", and "suggestion".""",
        ),
        PromptTemplate(
            "keyword_highlighting",
            _KEYWORD_HIGHLIGHTING_BODY
            + """

card1.content:
{card1_content}

card2.content:
{card2_content}

Respond with a single JSON object with numeric keys "similarity_pct", "contrastive_pct", "complementary_pct" and a key "highlights" holding a list of objects with keys "style" (similarity, contrastive, or complementary), "quote_a", "quote_b", and "aspect".""",
        ),
        PromptTemplate(
            "summarization",
            _SUMMARIZATION_BODY
            + """

Content:
{content}

Respond with a single JSON object whose key "bullets" holds a list of 1-3 strings.""",
        ),
        PromptTemplate(
            "aspect_extraction",
            _ASPECT_EXTRACTION_BODY
            + """

Article:
{article}

card1.content:
{card1_content}

card2.content:
{card2_content}

Respond with a single JSON object with keys "aspects_a" and "aspects_b", each a list of exactly three objects with keys "keyword", "description", and "source_span".""",
        ),
    )
}

#: First body line per template; distinct across all templates, used by the
#: stub provider to recognize which template produced a prompt.
TEMPLATE_FINGERPRINTS: dict[str, str] = {
    tid: t.body.splitlines()[0] for tid, t in TEMPLATES.items()
}


def render_prompt(template_id: str, bindings: dict[str, object]) -> str:
    """Substitute every placeholder in the template with its binding.

    Unused bindings are ignored. Raises:
        NotFoundError: unknown template id.
        BindingError: a placeholder has no binding (names the placeholder).
    """
    template = TEMPLATES.get(template_id)
    if template is None:
        raise NotFoundError(f"unknown prompt template {template_id!r}")

    def substitute(match: re.Match) -> str:
        name = match.group(1)
        if name not in bindings:
            raise BindingError(name, template_id)
        return str(bindings[name])

    return _PLACEHOLDER_RE.sub(substitute, template.body)


def with_nonce(prompt: str, nonce: int) -> str:
    """Append the regeneration marker; nonce 0 leaves the prompt untouched."""
    if nonce <= 0:
        return prompt
    return f"{prompt}\n\n[regeneration nonce: {nonce}]"


def parse_nonce(prompt: str) -> int:
    match = _NONCE_RE.search(prompt)
    return int(match.group(1)) if match else 0


def fingerprint_template(prompt: str) -> str | None:
    """Template id whose distinctive first line occurs in ``prompt``."""
    for tid, line in TEMPLATE_FINGERPRINTS.items():
        if line in prompt:
            return tid
    return None
