/** JSON payload shapes exactly as the service emits them. */

export type Band = "high" | "medium" | "low";
export type Style = "similarity" | "contrastive" | "complementary";
export type Mode = "private" | "public";

export interface ParagraphJson {
  index: number;
  text: string;
  word_count: number;
}

export interface MaterialJson {
  id: string;
  title: string;
  paragraphs: ParagraphJson[];
}

export interface PostJson {
  id: string;
  author: string;
  material_id: string;
  anchor_paragraph: number;
  content: string;
  visibility: Mode;
  created_at: number;
  parent: string | null;
  merged_from: string[];
  highlight_range: [number, number] | null;
}

export interface StateJson {
  user: string;
  material_id: string;
  mode: Mode;
  private_post_count: number;
  version: number;
}

export interface AffinityEntryJson {
  post_id: string;
  affinity_type: string;
  relevance_score: number;
  band: Band;
  color: string;
  theme: string | null;
  percentage: number | null;
  warnings: string[];
}

export interface OrderingJson {
  primary_post_id: string;
  entries: AffinityEntryJson[];
}

export interface SummaryJson {
  target_post_id: string;
  bullets: string[];
  includes_replies: boolean;
  nonce: number;
}

export interface HighlightJson {
  style: Style;
  quote_a: string;
  quote_b: string;
  aspect: string;
  color: string;
}

export interface PairJson {
  post_a_id: string;
  post_b_id: string;
  distribution: {
    similarity_pct: number;
    contrastive_pct: number;
    complementary_pct: number;
  };
  highlights: HighlightJson[];
}

export interface AspectJson {
  keyword: string;
  description: string;
  source_span: string;
  warnings: string[];
}

export interface AspectSetJson {
  post_id: string;
  aspects: AspectJson[];
}

export interface QuestionJson {
  text: string;
  style: Style;
  word_count: number;
  warnings: string[];
}

export interface EvidenceBlockJson {
  key_concept: string;
  excerpt: string;
  paragraph_indices: number[];
  connection: string;
  color: string;
  warnings: string[];
}

export interface ArtifactJson {
  question: QuestionJson;
  style: Style;
  evidence: EvidenceBlockJson[];
}

export interface HotSpotJson {
  paragraph_index: number;
  keyword: string;
  class_post_count: number;
  warnings: string[];
}

export interface EngagedRegionJson {
  paragraph_index: number;
  theme: string;
  post_ids: string[];
  summary: string;
  suggestion: string;
  keywords: string[];
}

export interface PeerSliceJson {
  peer: string;
  interaction_count: number;
  share_pct: number;
  summary: string;
  suggestion: string;
  keywords: string[];
}

export interface QuestionRefJson {
  text: string;
  style: Style;
  word_count: number;
  asked_at: number;
}

export interface ReportJson {
  user: string;
  material_id: string;
  generated_at: number;
  hot_spots: HotSpotJson[];
  reflection: {
    engaged: EngagedRegionJson[];
    underexplored: number[];
  };
  peer_slices: PeerSliceJson[];
  question_history: QuestionRefJson[];
}

export interface ErrorEnvelope {
  code: string;
  message: string;
  detail: unknown;
}
