"""Ingest a reading, chunk it, and run closed-corpus similarity search.

Everything here is offline: the stub embedder is a deterministic token-hash
histogram, so the same text always lands at the same point on the sphere.
"""

from marginalia import StubEmbedder, build_index, chunk_material, parse_material, top_k

READING = """\
International climate policy asks nations to give up short-term advantages for a shared long-term good. Most agreements begin with voluntary pledges, and most pledges fall short of what models say is required.

Economic nationalism complicates every round of negotiation. Governments that protect domestic industries with tariffs and subsidies treat emission limits as a competitive handicap, and they resist commitments that rivals might evade.

Game theorists describe the standoff as a prisoner's dilemma. Each country gains the most by letting others cut emissions first, yet when every government reasons this way, collective restraint collapses and all parties end up worse off.

International frameworks try to escape the trap by changing the payoffs. Treaties that combine monitoring, border adjustments, and graduated sanctions make defection visible and expensive, which shifts the rational strategy toward cooperation.
"""

material = parse_material(READING, "Climate Cooperation", material_id="demo")
print(f"parsed {len(material.paragraphs)} paragraphs")
for paragraph in material.paragraphs:
    print(f"  [{paragraph.index}] {paragraph.word_count:>3} words: {paragraph.text[:60]}...")

chunks = chunk_material(material, max_chunk_words=200)
print(f"\nchunked into {len(chunks)} retrieval units")

embedder = StubEmbedder()
index = build_index(material.id, chunks, embedder)
print(f"indexed at dimension {index.dimension}\n")

for query in (
    "prisoner's dilemma and strategic waiting",
    "tariffs protecting domestic industry",
    "treaty sanctions and monitoring",
):
    results = top_k(index, embedder.embed(query), k=2)
    print(f"query: {query!r}")
    by_id = {c.chunk_id: c for c in chunks}
    for result in results:
        chunk = by_id[result.chunk_id]
        print(f"  {result.score:+.3f} p{chunk.paragraph_indices[0]}: {chunk.text[:70]}...")
    print()
