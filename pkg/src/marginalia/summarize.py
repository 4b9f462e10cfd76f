"""Bullet-list summarization of single posts and whole reply threads."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from pydantic import BaseModel

from .errors import DomainError
from .gateway import Gateway, ValidationRule
from .model import Post
from .text import word_count

MAX_BULLETS = 3
MAX_BULLET_WORDS = 30


class SummaryResponse(BaseModel):
    bullets: list[str]


@dataclass(frozen=True)
class Summary:
    target_post_id: str
    bullets: tuple[str, ...]
    includes_replies: bool
    nonce: int = 0

    def __post_init__(self):
        if not 1 <= len(self.bullets) <= MAX_BULLETS:
            raise DomainError(f"summary must have 1-{MAX_BULLETS} bullets")
        for bullet in self.bullets:
            if word_count(bullet) > MAX_BULLET_WORDS:
                raise DomainError(f"bullet exceeds {MAX_BULLET_WORDS} words: {bullet!r}")


def _bullet_count(response: SummaryResponse) -> Optional[str]:
    n = len(response.bullets)
    if not 1 <= n <= MAX_BULLETS:
        return f"{n} bullets, expected 1-{MAX_BULLETS}"
    return None


def _bullet_words(response: SummaryResponse) -> Optional[str]:
    for bullet in response.bullets:
        count = word_count(bullet)
        if count > MAX_BULLET_WORDS:
            return f"bullet has {count} words (limit {MAX_BULLET_WORDS}): {bullet!r}"
        if count == 0:
            return "empty bullet"
    return None


SUMMARY_RULES = [
    ValidationRule("bullets_count", _bullet_count, f"1-{MAX_BULLETS} bullets"),
    ValidationRule("bullet_words", _bullet_words, f"each bullet at most {MAX_BULLET_WORDS} words"),
]


def thread_text(root: Post, descendants: Sequence[Post]) -> str:
    """Aggregate a reply tree depth-first, children in creation order."""
    children: dict[str, list[Post]] = {}
    for post in descendants:
        children.setdefault(post.parent or "", []).append(post)
    for siblings in children.values():
        siblings.sort(key=lambda p: (p.created_at, p.id))

    parts = [root.content]

    def walk(post_id: str) -> None:
        for child in children.get(post_id, ()):
            parts.append(f"[reply by {child.author}]\n{child.content}")
            walk(child.id)

    walk(root.id)
    return "\n\n".join(parts)


def _validate_tree(root: Post, descendants: Sequence[Post]) -> None:
    known = {root.id} | {d.id for d in descendants}
    for post in descendants:
        if post.parent is None or post.parent not in known:
            raise DomainError(
                f"post {post.id!r} does not belong to the reply tree of {root.id!r}"
            )


def summarize_post(
    post: Post,
    include_replies: bool,
    gateway: Gateway,
    descendants: Sequence[Post] = (),
    *,
    nonce: int = 0,
) -> Summary:
    """Summarize one post, optionally with its full reply subtree bound into
    the prompt in thread order."""
    if include_replies:
        _validate_tree(post, descendants)
        content = thread_text(post, descendants)
    else:
        content = post.content
    result = gateway.complete_structured(
        "summarization", {"content": content}, SummaryResponse, SUMMARY_RULES, nonce=nonce
    )
    return Summary(
        target_post_id=post.id,
        bullets=tuple(result.value.bullets),
        includes_replies=include_replies,
        nonce=nonce,
    )


def summarize_thread(root: Post, descendants: Sequence[Post], gateway: Gateway) -> Summary:
    """Summarize a whole thread; with no descendants this degenerates to
    summarize_post(root, False) including an identical prompt binding."""
    return summarize_post(root, bool(descendants), gateway, descendants)


def regenerate(
    summary: Summary, post: Post, gateway: Gateway, descendants: Sequence[Post] = ()
) -> Summary:
    """Produce a fresh summary with the next regeneration nonce."""
    if post.id != summary.target_post_id:
        raise DomainError("regenerate requires the summary's own target post")
    return summarize_post(
        post, summary.includes_replies, gateway, descendants, nonce=summary.nonce + 1
    )
