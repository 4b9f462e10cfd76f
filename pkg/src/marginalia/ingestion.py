"""Material parsing and retrieval chunking.

Uploads are plain text (markdown passes through verbatim, uninterpreted).
Paragraphs are blank-line-separated blocks. Parsing canonicalizes the text —
CRLF to LF, trailing whitespace trimmed per block, blank-line runs collapsed
to one separator — so that joining paragraphs with a blank line reproduces
``raw_text`` for every input, and every downstream verbatim check runs
against one consistent form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import DomainError, IngestionError
from .model import Material, Paragraph
from .text import normalize_newlines, verbatim_contains, word_count

#: Default chunk budget. Materials run roughly 1,000-9,000 words, so 200-word
#: chunks give 5-50 retrieval units per material.
DEFAULT_MAX_CHUNK_WORDS = 200

# A sentence ends at ./!/? followed by whitespace; the whitespace stays with
# the preceding sentence so pieces concatenate back to the paragraph exactly.
_SENTENCE_RE = re.compile(r".*?[.!?](?:\s+|$)|.+$", re.DOTALL)
_LEADING_BLANK_LINES = re.compile(r"^(?:[ \t]*\n)+")


@dataclass(frozen=True)
class Chunk:
    """A retrieval unit that preserves paragraph provenance.

    ``text`` is verbatim in the material's raw_text; ``paragraph_indices``
    are the contiguous paragraphs the chunk covers (always one with the
    current splitter, kept as a list for schema stability).
    """

    chunk_id: str
    material_id: str
    paragraph_indices: tuple[int, ...]
    text: str

    @property
    def word_count(self) -> int:
        return word_count(self.text)


def parse_material(raw: str, title: str, material_id: str = "material") -> Material:
    """Split an upload into blank-line-separated paragraphs, indexed 0..n-1.

    Raises:
        IngestionError: if the input has no non-whitespace content.
    """
    if not raw or not raw.strip():
        raise IngestionError("material text is empty or whitespace-only")
    normalized = normalize_newlines(raw)
    normalized = _LEADING_BLANK_LINES.sub("", normalized)
    blocks = re.split(r"\n\s*\n", normalized)
    paragraphs = []
    for block in blocks:
        trimmed = block.rstrip()
        if not trimmed:
            continue
        paragraphs.append(Paragraph(index=len(paragraphs), text=trimmed))
    raw_text = "\n\n".join(p.text for p in paragraphs)
    return Material(id=material_id, title=title, paragraphs=tuple(paragraphs), raw_text=raw_text)


def split_sentences(text: str) -> list[str]:
    """Sentence pieces whose concatenation equals ``text`` exactly."""
    pieces = [m.group(0) for m in _SENTENCE_RE.finditer(text) if m.group(0)]
    assert "".join(pieces) == text
    return pieces


def chunk_material(material: Material, max_chunk_words: int = DEFAULT_MAX_CHUNK_WORDS) -> list[Chunk]:
    """Cut a material into chunks of at most ``max_chunk_words`` words.

    Each paragraph at or under the limit becomes one chunk. Longer paragraphs
    are split at sentence boundaries into consecutive chunks; a single
    sentence over the limit forms its own oversized chunk. Per paragraph the
    chunk texts concatenate back to the paragraph text, so coverage is exact
    with no overlap.

    Raises:
        DomainError: if ``max_chunk_words`` < 20.
    """
    if max_chunk_words < 20:
        raise DomainError(f"max_chunk_words must be >= 20, got {max_chunk_words}")
    chunks: list[Chunk] = []

    def emit(paragraph_index: int, text: str) -> None:
        chunk = Chunk(
            chunk_id=f"{material.id}:c{len(chunks):03d}",
            material_id=material.id,
            paragraph_indices=(paragraph_index,),
            text=text,
        )
        assert verbatim_contains(material.raw_text, chunk.text)
        chunks.append(chunk)

    for para in material.paragraphs:
        if para.word_count <= max_chunk_words:
            emit(para.index, para.text)
            continue
        buffer: list[str] = []
        buffered_words = 0
        for sentence in split_sentences(para.text):
            words = word_count(sentence)
            if buffer and buffered_words + words > max_chunk_words:
                emit(para.index, "".join(buffer))
                buffer, buffered_words = [], 0
            buffer.append(sentence)
            buffered_words += words
            if buffered_words > max_chunk_words:
                # single oversized sentence: flush it alone
                emit(para.index, "".join(buffer))
                buffer, buffered_words = [], 0
        if buffer:
            emit(para.index, "".join(buffer))
    return chunks


def locate_paragraphs(material: Material, excerpt: str) -> tuple[int, ...]:
    """Paragraph indices covering the first verbatim occurrence of ``excerpt``.

    Raises:
        DomainError: if the excerpt does not occur verbatim in the material.
    """
    needle = normalize_newlines(excerpt)
    start = material.raw_text.find(needle)
    if start < 0:
        raise DomainError("excerpt does not occur verbatim in material")
    end = start + len(needle)
    indices = []
    cursor = 0
    for para in material.paragraphs:
        para_start, para_end = cursor, cursor + len(para.text)
        if para_start < end and start < para_end:
            indices.append(para.index)
        cursor = para_end + 2  # the "\n\n" separator
    return tuple(indices)
