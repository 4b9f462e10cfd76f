/** Pure view-model builders: every piece of display math lives here, DOM-free,
 * so the contract (band colors, verbatim-only quote spans, pie angles) is
 * directly unit-testable.
 */

import type {
  AffinityEntryJson,
  Band,
  HighlightJson,
  OrderingJson,
  PeerSliceJson,
  PostJson,
  StateJson,
  Style,
} from "./types.js";

export const BAND_COLORS: Record<Band, string> = {
  high: "green",
  medium: "yellow",
  low: "red",
};

export const STYLE_COLORS: Record<Style, string> = {
  similarity: "green",
  contrastive: "yellow",
  complementary: "orange",
};

export interface DiscussionCard {
  postId: string;
  author: string;
  content: string;
  pinned: boolean;
  affinityType: string | null;
  band: Band | null;
  dotColor: string | null;
  warnings: string[];
}

/** The discussion column after an Order action: the primary post pinned
 * first, then every entry in the server's order with its band color dot. */
export function renderDiscussion(
  ordering: OrderingJson,
  postsById: Map<string, PostJson>,
): DiscussionCard[] {
  const primary = postsById.get(ordering.primary_post_id);
  if (!primary) {
    throw new Error(`primary post ${ordering.primary_post_id} not in the fetched posts`);
  }
  const cards: DiscussionCard[] = [
    {
      postId: primary.id,
      author: primary.author,
      content: primary.content,
      pinned: true,
      affinityType: null,
      band: null,
      dotColor: null,
      warnings: [],
    },
  ];
  for (const entry of ordering.entries) {
    const post = postsById.get(entry.post_id);
    if (!post) continue; // never render a post the API did not return
    cards.push({
      postId: post.id,
      author: post.author,
      content: post.content,
      pinned: false,
      affinityType: entry.affinity_type,
      band: entry.band,
      dotColor: BAND_COLORS[entry.band],
      warnings: entry.warnings,
    });
  }
  return cards;
}

export function entryDotColor(entry: AffinityEntryJson): string {
  return BAND_COLORS[entry.band];
}

export interface QuoteSegment {
  text: string;
  style: Style | null; // null = plain text
  color: string | null;
}

/** Split a post's content into plain and highlighted segments. Only quotes
 * that occur verbatim are highlighted; anything else is silently skipped,
 * so a span can never show text the post does not contain. Overlaps keep
 * the earliest (then longest) match. */
export function quoteSegments(
  content: string,
  quotes: { quote: string; style: Style }[],
): QuoteSegment[] {
  const matches: { start: number; end: number; style: Style }[] = [];
  for (const { quote, style } of quotes) {
    if (!quote) continue;
    const start = content.indexOf(quote);
    if (start < 0) continue; // not verbatim: never rendered
    matches.push({ start, end: start + quote.length, style });
  }
  matches.sort((a, b) => a.start - b.start || b.end - a.end);
  const segments: QuoteSegment[] = [];
  let cursor = 0;
  for (const match of matches) {
    if (match.start < cursor) continue; // overlapping a kept match
    if (match.start > cursor) {
      segments.push({ text: content.slice(cursor, match.start), style: null, color: null });
    }
    segments.push({
      text: content.slice(match.start, match.end),
      style: match.style,
      color: STYLE_COLORS[match.style],
    });
    cursor = match.end;
  }
  if (cursor < content.length) {
    segments.push({ text: content.slice(cursor), style: null, color: null });
  }
  return segments;
}

/** Segments for both sides of a pair analysis; zero-percentage styles have
 * no highlights upstream, so no spans of that color can appear. */
export function pairSegments(
  contentA: string,
  contentB: string,
  highlights: HighlightJson[],
): { a: QuoteSegment[]; b: QuoteSegment[] } {
  return {
    a: quoteSegments(contentA, highlights.map((h) => ({ quote: h.quote_a, style: h.style }))),
    b: quoteSegments(contentB, highlights.map((h) => ({ quote: h.quote_b, style: h.style }))),
  };
}

export interface PieSlice {
  peer: string;
  sharePct: number;
  startAngle: number; // degrees, 0 at 12 o'clock, clockwise
  endAngle: number;
  path: string; // SVG path for a unit-radius 100x100 viewBox
  keywords: string[];
}

const PIE_CENTER = 50;
const PIE_RADIUS = 45;

function polar(angleDeg: number): { x: number; y: number } {
  const rad = ((angleDeg - 90) * Math.PI) / 180;
  return {
    x: PIE_CENTER + PIE_RADIUS * Math.cos(rad),
    y: PIE_CENTER + PIE_RADIUS * Math.sin(rad),
  };
}

/** Pie geometry: each slice's angle is share_pct x 3.6 degrees, so the
 * slices of a non-empty chart always close the full 360. */
export function pieSlices(slices: PeerSliceJson[]): PieSlice[] {
  const out: PieSlice[] = [];
  let cursor = 0;
  for (const slice of slices) {
    const sweep = slice.share_pct * 3.6;
    const startAngle = cursor;
    const endAngle = cursor + sweep;
    out.push({
      peer: slice.peer,
      sharePct: slice.share_pct,
      startAngle,
      endAngle,
      path: slicePath(startAngle, endAngle),
      keywords: slice.keywords,
    });
    cursor = endAngle;
  }
  return out;
}

function slicePath(startAngle: number, endAngle: number): string {
  const sweep = endAngle - startAngle;
  if (sweep >= 360) {
    // a single full-circle slice needs two arcs
    const top = polar(0);
    const bottom = polar(180);
    return (
      `M ${top.x.toFixed(3)} ${top.y.toFixed(3)} ` +
      `A ${PIE_RADIUS} ${PIE_RADIUS} 0 1 1 ${bottom.x.toFixed(3)} ${bottom.y.toFixed(3)} ` +
      `A ${PIE_RADIUS} ${PIE_RADIUS} 0 1 1 ${top.x.toFixed(3)} ${top.y.toFixed(3)} Z`
    );
  }
  const from = polar(startAngle);
  const to = polar(endAngle);
  const largeArc = sweep > 180 ? 1 : 0;
  return (
    `M ${PIE_CENTER} ${PIE_CENTER} ` +
    `L ${from.x.toFixed(3)} ${from.y.toFixed(3)} ` +
    `A ${PIE_RADIUS} ${PIE_RADIUS} 0 ${largeArc} 1 ${to.x.toFixed(3)} ${to.y.toFixed(3)} Z`
  );
}

export interface ShowPublicControl {
  visible: boolean; // disappears after the transition (monotonic mirror)
  enabled: boolean;
  label: string;
}

/** The Show Public button state: disabled with an explanatory count until
 * the server gate would pass, gone entirely once public. */
export function showPublicControl(state: StateJson, minRequired: number): ShowPublicControl {
  if (state.mode === "public") {
    return { visible: false, enabled: false, label: "" };
  }
  const missing = Math.max(0, minRequired - state.private_post_count);
  if (missing > 0) {
    const noun = missing === 1 ? "post" : "posts";
    return {
      visible: true,
      enabled: false,
      label: `Show Public (write ${missing} more private ${noun})`,
    };
  }
  return { visible: true, enabled: true, label: "Show Public" };
}

/** Threading for the discussion panel: top-level cards in anchor order with
 * their reply subtrees attached (the API already sorts and filters). */
export interface ThreadedPost {
  post: PostJson;
  replies: ThreadedPost[];
}

export function threadPosts(posts: PostJson[]): ThreadedPost[] {
  const nodes = new Map<string, ThreadedPost>();
  for (const post of posts) {
    nodes.set(post.id, { post, replies: [] });
  }
  const roots: ThreadedPost[] = [];
  for (const node of nodes.values()) {
    const parent = node.post.parent ? nodes.get(node.post.parent) : undefined;
    if (parent) {
      parent.replies.push(node);
    } else {
      roots.push(node);
    }
  }
  const byCreation = (a: ThreadedPost, b: ThreadedPost) =>
    a.post.created_at - b.post.created_at;
  for (const node of nodes.values()) node.replies.sort(byCreation);
  roots.sort(
    (a, b) =>
      a.post.anchor_paragraph - b.post.anchor_paragraph ||
      a.post.created_at - b.post.created_at,
  );
  return roots;
}
