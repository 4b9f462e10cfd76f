"""HTTP+JSON API over the service core.

Every error leaves as the stable envelope ``{code, message, detail}``.
Authentication is a bearer token per user. When a built frontend bundle is
present it is mounted under /ui so the whole system can run off one port.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Header, Query, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from ..affinity import AffinityOrdering
from ..blend import AspectSet, BlendArtifact, InspiringQuestion
from ..errors import MarginaliaError, SessionError
from ..highlight import PairAnalysis
from ..model import Material, Post, band_color
from ..report import LearningReport
from ..summarize import Summary
from .core import ServiceCore


class MaterialBody(BaseModel):
    title: str
    text: str


class CreatePostBody(BaseModel):
    material_id: str
    anchor_paragraph: int
    content: str
    highlight_range: Optional[tuple[int, int]] = None


class ReplyBody(BaseModel):
    content: str


class MergeBody(BaseModel):
    post_ids: list[str] = Field(min_length=2)


class OrderBody(BaseModel):
    material_id: str
    post_id: str


class SummaryBody(BaseModel):
    post_id: str
    include_replies: bool = False
    regenerate: bool = False


class PairBody(BaseModel):
    post_a: str
    post_b: str


class AspectBody(BaseModel):
    keyword: str
    description: str
    source_span: str


class AspectsBody(BaseModel):
    post_a: str
    post_b: str


class QuestionBody(BaseModel):
    post_a: str
    post_b: str
    style: str
    aspect_a: AspectBody
    aspect_b: AspectBody


class EvidenceBody(QuestionBody):
    question: str


def material_json(material: Material) -> dict:
    return {
        "id": material.id,
        "title": material.title,
        "paragraphs": [
            {"index": p.index, "text": p.text, "word_count": p.word_count}
            for p in material.paragraphs
        ],
    }


def post_json(post: Post) -> dict:
    return {
        "id": post.id,
        "author": post.author,
        "material_id": post.material_id,
        "anchor_paragraph": post.anchor_paragraph,
        "content": post.content,
        "visibility": post.visibility.value,
        "created_at": post.created_at,
        "parent": post.parent,
        "merged_from": list(post.merged_from),
        "highlight_range": list(post.highlight_range) if post.highlight_range else None,
    }


def ordering_json(ordering: AffinityOrdering) -> dict:
    return {
        "primary_post_id": ordering.primary_post_id,
        "entries": [
            {
                "post_id": e.post_id,
                "affinity_type": e.affinity_type,
                "relevance_score": e.relevance_score,
                "band": e.band.value,
                "color": band_color(e.band),
                "theme": e.theme,
                "percentage": e.percentage,
                "warnings": list(e.warnings),
            }
            for e in ordering.ordered
        ],
    }


def summary_json(summary: Summary) -> dict:
    return {
        "target_post_id": summary.target_post_id,
        "bullets": list(summary.bullets),
        "includes_replies": summary.includes_replies,
        "nonce": summary.nonce,
    }


def pair_json(analysis: PairAnalysis) -> dict:
    return {
        "post_a_id": analysis.post_a_id,
        "post_b_id": analysis.post_b_id,
        "distribution": {
            "similarity_pct": analysis.distribution.similarity_pct,
            "contrastive_pct": analysis.distribution.contrastive_pct,
            "complementary_pct": analysis.distribution.complementary_pct,
        },
        "highlights": [
            {
                "style": h.style.value,
                "quote_a": h.quote_a,
                "quote_b": h.quote_b,
                "aspect": h.aspect,
                "color": h.color,
            }
            for h in analysis.highlights
        ],
    }


def aspect_set_json(aspect_set: AspectSet) -> dict:
    return {
        "post_id": aspect_set.post_id,
        "aspects": [
            {
                "keyword": a.keyword,
                "description": a.description,
                "source_span": a.source_span,
                "warnings": list(a.warnings),
            }
            for a in aspect_set.aspects
        ],
    }


def question_json(question: InspiringQuestion) -> dict:
    return {
        "text": question.text,
        "style": question.style.value,
        "word_count": question.word_count,
        "warnings": list(question.warnings),
    }


def artifact_json(artifact: BlendArtifact) -> dict:
    return {
        "question": question_json(artifact.question),
        "style": artifact.selection.style.value,
        "evidence": [
            {
                "key_concept": b.key_concept,
                "excerpt": b.excerpt,
                "paragraph_indices": list(b.paragraph_indices),
                "connection": b.connection,
                "color": b.color,
                "warnings": list(b.warnings),
            }
            for b in artifact.evidence
        ],
    }


def report_json(report: LearningReport) -> dict:
    return {
        "user": report.user,
        "material_id": report.material_id,
        "generated_at": report.generated_at,
        "hot_spots": [
            {
                "paragraph_index": h.paragraph_index,
                "keyword": h.keyword,
                "class_post_count": h.class_post_count,
                "warnings": list(h.warnings),
            }
            for h in report.hot_spots
        ],
        "reflection": {
            "engaged": [
                {
                    "paragraph_index": r.paragraph_index,
                    "theme": r.theme,
                    "post_ids": list(r.post_ids),
                    "summary": r.summary,
                    "suggestion": r.suggestion,
                    "keywords": list(r.keywords),
                }
                for r in report.reflection.engaged
            ],
            "underexplored": list(report.reflection.underexplored),
        },
        "peer_slices": [
            {
                "peer": s.peer,
                "interaction_count": s.interaction_count,
                "share_pct": s.share_pct,
                "summary": s.summary,
                "suggestion": s.suggestion,
                "keywords": list(s.keywords),
            }
            for s in report.peer_slices
        ],
        "question_history": [
            {
                "text": q.text,
                "style": q.style.value,
                "word_count": q.word_count,
                "asked_at": q.asked_at,
            }
            for q in report.question_history
        ],
    }


def _token(authorization: Optional[str]) -> str:
    if not authorization or not authorization.startswith("Bearer "):
        raise SessionError("missing bearer token")
    return authorization.removeprefix("Bearer ").strip()


def create_app(core: ServiceCore, frontend_dist: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="marginalia", docs_url=None, redoc_url=None)

    @app.exception_handler(MarginaliaError)
    async def marginalia_error_handler(request: Request, exc: MarginaliaError):
        return JSONResponse(status_code=exc.http_status, content=exc.envelope())

    @app.post("/materials")
    def create_material(body: MaterialBody, authorization: Optional[str] = Header(None)):
        core.authenticate(_token(authorization))
        return material_json(core.ingest_material(body.title, body.text))

    @app.get("/materials/{material_id}")
    def get_material(
        material_id: str,
        paragraph: Optional[int] = Query(None),
        authorization: Optional[str] = Header(None),
    ):
        material = core.view_material(_token(authorization), material_id, paragraph)
        return material_json(material)

    @app.get("/state/{material_id}")
    def get_state(material_id: str, authorization: Optional[str] = Header(None)):
        return core.get_state(_token(authorization), material_id)

    @app.post("/state/{material_id}/show-public")
    def show_public(material_id: str, authorization: Optional[str] = Header(None)):
        return core.show_public(_token(authorization), material_id)

    @app.post("/posts")
    def create_post(body: CreatePostBody, authorization: Optional[str] = Header(None)):
        post = core.create_post(
            _token(authorization),
            body.material_id,
            body.anchor_paragraph,
            body.content,
            highlight_range=body.highlight_range,
        )
        return post_json(post)

    @app.post("/posts/{post_id}/reply")
    def reply(post_id: str, body: ReplyBody, authorization: Optional[str] = Header(None)):
        token = _token(authorization)
        parent = core._post_payload(post_id)  # material comes from the parent
        post = core.create_post(
            token, parent["material_id"], None, body.content, parent=post_id
        )
        return post_json(post)

    @app.post("/posts/merge")
    def merge(body: MergeBody, authorization: Optional[str] = Header(None)):
        return post_json(core.merge_posts(_token(authorization), body.post_ids))

    @app.get("/posts")
    def list_posts(
        material: str = Query(...), authorization: Optional[str] = Header(None)
    ):
        posts = core.list_visible_posts(_token(authorization), material)
        return [post_json(p) for p in posts]

    @app.post("/pipelines/order")
    def order(body: OrderBody, authorization: Optional[str] = Header(None)):
        ordering = core.pipeline_order(_token(authorization), body.material_id, body.post_id)
        return ordering_json(ordering)

    @app.post("/pipelines/summary")
    def summary(body: SummaryBody, authorization: Optional[str] = Header(None)):
        result = core.pipeline_summary(
            _token(authorization), body.post_id, body.include_replies, body.regenerate
        )
        return summary_json(result)

    @app.post("/pipelines/pair")
    def pair(body: PairBody, authorization: Optional[str] = Header(None)):
        analysis = core.pipeline_pair(_token(authorization), body.post_a, body.post_b)
        return pair_json(analysis)

    @app.post("/pipelines/aspects")
    def aspects(body: AspectsBody, authorization: Optional[str] = Header(None)):
        set_a, set_b = core.pipeline_aspects(_token(authorization), body.post_a, body.post_b)
        return {"aspects_a": aspect_set_json(set_a), "aspects_b": aspect_set_json(set_b)}

    @app.post("/pipelines/question")
    def question(body: QuestionBody, authorization: Optional[str] = Header(None)):
        result = core.pipeline_question(
            _token(authorization),
            body.post_a,
            body.post_b,
            body.style,
            body.aspect_a.model_dump(),
            body.aspect_b.model_dump(),
        )
        return question_json(result)

    @app.post("/pipelines/evidence")
    def evidence(body: EvidenceBody, authorization: Optional[str] = Header(None)):
        artifact = core.pipeline_evidence(
            _token(authorization),
            body.post_a,
            body.post_b,
            body.style,
            body.aspect_a.model_dump(),
            body.aspect_b.model_dump(),
            body.question,
        )
        return artifact_json(artifact)

    @app.get("/report")
    def report(material: str = Query(...), authorization: Optional[str] = Header(None)):
        return report_json(core.generate_report(_token(authorization), material))

    if frontend_dist and Path(frontend_dist).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(frontend_dist), html=True), name="ui")

    return app
