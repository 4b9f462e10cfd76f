/** Application wiring: fetch state from the API, hand it to the view-model
 * builders, and paint. The client never invents data: posts, bands, quotes,
 * and report numbers all come straight from server responses.
 */

import { ApiClient, ApiError, type AspectInput } from "./api.js";
import { HOVER_DEBOUNCE_MS, HoverDebouncer } from "./debounce.js";
import { banner, clear, el, svgEl } from "./dom.js";
import * as state from "./state.js";
import type {
  AspectSetJson,
  MaterialJson,
  OrderingJson,
  PairJson,
  PostJson,
  ReportJson,
  StateJson,
  Style,
} from "./types.js";
import {
  pairSegments,
  pieSlices,
  quoteSegments,
  renderDiscussion,
  showPublicControl,
  threadPosts,
  type QuoteSegment,
} from "./views.js";

const MIN_PRIVATE_POSTS = 2;

interface AppContext {
  api: ApiClient;
  view: state.ViewState;
  material: MaterialJson | null;
  posts: PostJson[];
  serverState: StateJson | null;
  ordering: OrderingJson | null;
  pair: PairJson | null;
  aspects: { a: AspectSetJson; b: AspectSetJson } | null;
  root: HTMLElement;
}

function query(name: string): string | null {
  return new URLSearchParams(window.location.search).get(name);
}

export async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app mount point");
  const token = query("token") ?? window.localStorage.getItem("token") ?? "";
  const materialId = query("material") ?? window.localStorage.getItem("material") ?? "";
  if (!token || !materialId) {
    renderLogin(root);
    return;
  }
  window.localStorage.setItem("token", token);
  window.localStorage.setItem("material", materialId);
  const ctx: AppContext = {
    api: new ApiClient("", token),
    view: state.selectMaterial(state.initialState(), materialId),
    material: null,
    posts: [],
    serverState: null,
    ordering: null,
    pair: null,
    aspects: null,
    root,
  };
  await refresh(ctx);
}

function renderLogin(root: HTMLElement): void {
  clear(root);
  const tokenInput = el("input", { placeholder: "session token", id: "token" });
  const materialInput = el("input", { placeholder: "material id (e.g. m1)", id: "material" });
  const go = el("button", { text: "Open" });
  go.addEventListener("click", () => {
    const token = (tokenInput as HTMLInputElement).value.trim();
    const material = (materialInput as HTMLInputElement).value.trim();
    window.location.search = `?token=${encodeURIComponent(token)}&material=${encodeURIComponent(material)}`;
  });
  root.append(
    el("div", { class: "login" }, [
      el("h1", { text: "marginalia" }),
      el("p", { text: "Paste your session token and the material id." }),
      tokenInput,
      materialInput,
      go,
    ]),
  );
}

async function refresh(ctx: AppContext): Promise<void> {
  const materialId = ctx.view.materialId;
  if (!materialId) return;
  try {
    ctx.material = await ctx.api.getMaterial(materialId);
    ctx.serverState = await ctx.api.getState(materialId);
    ctx.posts = await ctx.api.listPosts(materialId);
    ctx.view = state.syncMode(ctx.view, ctx.serverState.mode);
  } catch (error) {
    clear(ctx.root);
    banner(ctx.root, describe(error));
    return;
  }
  paint(ctx);
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return `${error.envelope.code}: ${error.envelope.message}`;
  return String(error);
}

function paint(ctx: AppContext): void {
  clear(ctx.root);
  const header = el("header", {}, [
    el("h1", { text: ctx.material?.title ?? "marginalia" }),
    navButton(ctx, "reading", "Reading"),
    navButton(ctx, "report", "Report"),
  ]);
  if (ctx.view.committedPair) header.append(navButton(ctx, "blending", "Blending"));
  ctx.root.append(header);
  if (ctx.view.activePage === "reading") paintReading(ctx);
  else if (ctx.view.activePage === "blending") paintBlending(ctx);
  else void paintReport(ctx);
}

function navButton(ctx: AppContext, page: state.Page, label: string): HTMLElement {
  const button = el("button", { text: label, class: ctx.view.activePage === page ? "active" : "" });
  button.addEventListener("click", () => {
    if (page === "blending") ctx.view = state.openBlending(ctx.view);
    else if (page === "report") ctx.view = state.openReport(ctx.view);
    else ctx.view = state.openReading(ctx.view);
    paint(ctx);
  });
  return button;
}

// ----- reading page ---------------------------------------------------------

function paintReading(ctx: AppContext): void {
  const layout = el("div", { class: "two-panel" });
  layout.append(readingPanel(ctx), discussionPanel(ctx));
  ctx.root.append(layout);
}

function readingPanel(ctx: AppContext): HTMLElement {
  const panel = el("section", { class: "reading-panel" });
  if (!ctx.material) return panel;
  for (const paragraph of ctx.material.paragraphs) {
    const block = el("p", {
      class: "paragraph",
      id: `paragraph-${paragraph.index}`,
      text: paragraph.text,
    });
    block.addEventListener("click", () => annotate(ctx, paragraph.index));
    panel.append(block);
  }
  return panel;
}

async function annotate(ctx: AppContext, paragraphIndex: number): Promise<void> {
  const content = window.prompt(`Annotate paragraph ${paragraphIndex}:`);
  if (!content) return;
  try {
    await ctx.api.createPost(ctx.view.materialId!, paragraphIndex, content);
    await refresh(ctx);
  } catch (error) {
    banner(ctx.root, describe(error));
  }
}

function discussionPanel(ctx: AppContext): HTMLElement {
  const panel = el("section", { class: "discussion-panel" });
  if (ctx.serverState) {
    const control = showPublicControl(ctx.serverState, MIN_PRIVATE_POSTS);
    if (control.visible) {
      const button = el("button", { text: control.label, class: "show-public" });
      if (!control.enabled) button.setAttribute("disabled", "disabled");
      button.addEventListener("click", async () => {
        try {
          ctx.serverState = await ctx.api.showPublic(ctx.view.materialId!);
          ctx.view = state.syncMode(ctx.view, ctx.serverState.mode);
          await refresh(ctx);
        } catch (error) {
          banner(ctx.root, describe(error));
        }
      });
      panel.append(button);
    }
  }
  if (ctx.ordering) {
    panel.append(orderedList(ctx, ctx.ordering));
    return panel;
  }
  for (const thread of threadPosts(ctx.posts)) {
    panel.append(postCard(ctx, thread.post, thread.replies.map((r) => r.post)));
  }
  return panel;
}

function postCard(ctx: AppContext, post: PostJson, replies: PostJson[] = []): HTMLElement {
  const card = el("article", { class: "post-card", draggable: "true", "data-post": post.id });
  card.append(el("div", { class: "author", text: `${post.author} @p${post.anchor_paragraph}` }));
  const body = el("div", { class: "content" });
  renderSegments(body, contentSegments(ctx, post));
  card.append(body);

  const actions = el("div", { class: "actions" });
  const orderButton = el("button", { text: "Order" });
  orderButton.addEventListener("click", () => runOrder(ctx, post.id));
  const summaryButton = el("button", { text: "Generate Summary" });
  summaryButton.addEventListener("click", () => runSummary(ctx, card, post.id));
  const replyButton = el("button", { text: "Reply" });
  replyButton.addEventListener("click", async () => {
    const content = window.prompt("Reply:");
    if (!content) return;
    try {
      await ctx.api.reply(post.id, content);
      await refresh(ctx);
    } catch (error) {
      banner(ctx.root, describe(error));
    }
  });
  actions.append(orderButton, summaryButton, replyButton);
  card.append(actions);

  card.addEventListener("dragstart", () => {
    ctx.view = state.beginDrag(ctx.view, post.id);
  });
  card.addEventListener("dragover", (event) => {
    event.preventDefault();
    if (ctx.view.dragSource && ctx.view.dragSource !== post.id) {
      ctx.view = state.hoverOver(ctx.view, post.id);
      hoverDebouncer(ctx).schedule(post.id);
    }
  });
  card.addEventListener("drop", (event) => {
    event.preventDefault();
    if (ctx.view.dragSource && ctx.view.hoverTarget === post.id) {
      ctx.view = state.commitPair(ctx.view);
      ctx.view = state.openBlending(ctx.view);
      void loadAspects(ctx);
    }
  });
  for (const reply of replies) {
    card.append(el("div", { class: "reply" }, [
      el("span", { class: "author", text: reply.author }),
      el("span", { text: ` ${reply.content}` }),
    ]));
  }
  return card;
}

function contentSegments(ctx: AppContext, post: PostJson): QuoteSegment[] {
  if (ctx.pair) {
    if (post.id === ctx.pair.post_a_id || post.id === ctx.pair.post_b_id) {
      const segments = pairSegments(
        ctx.posts.find((p) => p.id === ctx.pair!.post_a_id)?.content ?? "",
        ctx.posts.find((p) => p.id === ctx.pair!.post_b_id)?.content ?? "",
        ctx.pair.highlights,
      );
      return post.id === ctx.pair.post_a_id ? segments.a : segments.b;
    }
  }
  return quoteSegments(post.content, []);
}

function renderSegments(target: HTMLElement, segments: QuoteSegment[]): void {
  for (const segment of segments) {
    if (segment.style) {
      target.append(
        el("mark", { class: `quote ${segment.style}`, text: segment.text }),
      );
    } else {
      target.append(segment.text);
    }
  }
}

let sharedDebouncer: HoverDebouncer<PairJson> | null = null;

function hoverDebouncer(ctx: AppContext): HoverDebouncer<PairJson> {
  if (!sharedDebouncer) {
    sharedDebouncer = new HoverDebouncer<PairJson>(
      (target) => ctx.api.pairAnalysis(ctx.view.dragSource ?? "", target),
      (_target, pair) => {
        ctx.pair = pair;
        paint(ctx);
      },
      (_target, error) => banner(ctx.root, describe(error)),
      HOVER_DEBOUNCE_MS,
    );
  }
  return sharedDebouncer;
}

async function runOrder(ctx: AppContext, postId: string): Promise<void> {
  try {
    ctx.ordering = await ctx.api.order(ctx.view.materialId!, postId);
    paint(ctx);
  } catch (error) {
    banner(ctx.root, describe(error)); // prior list stays untouched
  }
}

function orderedList(ctx: AppContext, ordering: OrderingJson): HTMLElement {
  const wrap = el("div", { class: "ordered" });
  const clearButton = el("button", { text: "Clear ordering" });
  clearButton.addEventListener("click", () => {
    ctx.ordering = null;
    paint(ctx);
  });
  wrap.append(clearButton);
  const postsById = new Map(ctx.posts.map((p) => [p.id, p]));
  for (const card of renderDiscussion(ordering, postsById)) {
    const element = postCard(ctx, postsById.get(card.postId)!);
    if (card.pinned) element.classList.add("pinned");
    if (card.dotColor) {
      element.prepend(
        el("span", { class: `band-dot ${card.dotColor}`, title: card.band ?? "" }),
        el("span", { class: "affinity-type", text: card.affinityType ?? "" }),
      );
    }
    wrap.append(element);
  }
  return wrap;
}

async function runSummary(ctx: AppContext, card: HTMLElement, postId: string): Promise<void> {
  try {
    const summary = await ctx.api.summarize(postId, true);
    const list = el("ul", { class: "summary" });
    for (const bullet of summary.bullets) list.append(el("li", { text: bullet }));
    card.append(list);
  } catch (error) {
    banner(ctx.root, describe(error));
  }
}

// ----- blending page --------------------------------------------------------

async function loadAspects(ctx: AppContext): Promise<void> {
  const pair = ctx.view.committedPair;
  if (!pair) return;
  try {
    const response = await ctx.api.aspects(pair.source, pair.target);
    ctx.aspects = { a: response.aspects_a, b: response.aspects_b };
  } catch (error) {
    banner(ctx.root, describe(error));
  }
  paint(ctx);
}

function paintBlending(ctx: AppContext): void {
  const pair = ctx.view.committedPair;
  const page = el("section", { class: "blending" });
  ctx.root.append(page);
  if (!pair || !ctx.aspects) {
    page.append(el("p", { text: "Loading aspects..." }));
    return;
  }
  const styleSelect = el("select", { id: "style" });
  for (const style of ["similarity", "contrastive", "complementary"] as Style[]) {
    styleSelect.append(el("option", { value: style, text: style }));
  }
  const pick = (set: AspectSetJson, name: string): HTMLSelectElement => {
    const select = el("select", { id: name });
    set.aspects.forEach((aspect, i) => {
      select.append(el("option", { value: String(i), text: `${aspect.keyword}: ${aspect.description}` }));
    });
    return select;
  };
  const pickA = pick(ctx.aspects.a, "aspect-a");
  const pickB = pick(ctx.aspects.b, "aspect-b");
  const blendButton = el("button", { text: "Blend" });
  const output = el("div", { class: "blend-output" });
  const draft = el("textarea", { class: "draft", placeholder: "Compose your reply..." });
  const submit = el("button", { text: "Post reply" });

  blendButton.addEventListener("click", async () => {
    clear(output);
    const style = (styleSelect as HTMLSelectElement).value as Style;
    const aspectA = toInput(ctx.aspects!.a, Number(pickA.value));
    const aspectB = toInput(ctx.aspects!.b, Number(pickB.value));
    try {
      const question = await ctx.api.question(pair.source, pair.target, style, aspectA, aspectB);
      output.append(el("blockquote", { class: "question", text: question.text }));
      for (const warning of question.warnings) {
        output.append(el("div", { class: "warning", text: warning }));
      }
      const artifact = await ctx.api.evidence(
        pair.source, pair.target, style, aspectA, aspectB, question.text,
      );
      for (const block of artifact.evidence) {
        const card = el("div", { class: "evidence" });
        card.setAttribute("style", `border-left: 6px solid ${block.color}`);
        card.append(
          el("strong", { text: block.key_concept }),
          el("p", { text: block.excerpt }),
          el("small", { text: block.connection }),
        );
        card.addEventListener("click", () => {
          ctx.view = state.openReading(ctx.view);
          paint(ctx);
          const target = document.getElementById(`paragraph-${block.paragraph_indices[0]}`);
          target?.scrollIntoView({ behavior: "smooth" });
          target?.classList.add("flash");
        });
        output.append(card);
      }
    } catch (error) {
      banner(ctx.root, describe(error)); // question (if shown) is preserved
    }
  });

  submit.addEventListener("click", async () => {
    const content = (draft as HTMLTextAreaElement).value.trim();
    if (!content) return;
    try {
      await ctx.api.reply(pair.target, content);
      ctx.view = state.openReading(ctx.view);
      await refresh(ctx);
    } catch (error) {
      banner(ctx.root, describe(error)); // draft stays in the editor
    }
  });

  page.append(
    el("h2", { text: "Conceptual blending" }),
    el("label", { text: "Style " }), styleSelect,
    el("label", { text: " Aspect from your post " }), pickA,
    el("label", { text: " Aspect from theirs " }), pickB,
    blendButton, draft, submit, output,
  );
}

function toInput(set: AspectSetJson, index: number): AspectInput {
  const aspect = set.aspects[index];
  return {
    keyword: aspect.keyword,
    description: aspect.description,
    source_span: aspect.source_span,
  };
}

// ----- report page ----------------------------------------------------------

async function paintReport(ctx: AppContext): Promise<void> {
  const page = el("section", { class: "report" });
  ctx.root.append(page);
  let report: ReportJson;
  try {
    report = await ctx.api.report(ctx.view.materialId!);
  } catch (error) {
    page.append(el("p", { class: "banner", text: describe(error) }));
    return;
  }

  const hotSpots = el("div", { class: "hot-spots" }, [el("h2", { text: "Hot spots" })]);
  if (report.hot_spots.length === 0) {
    hotSpots.append(el("p", { class: "empty", text: "No paragraph has enough posts yet." }));
  }
  for (const spot of report.hot_spots) {
    const chip = el("button", {
      class: "hot-spot",
      text: `p${spot.paragraph_index} ${spot.keyword} (${spot.class_post_count})`,
    });
    chip.addEventListener("mouseenter", () => {
      document
        .getElementById(`paragraph-${spot.paragraph_index}`)
        ?.classList.add("hot-highlight");
    });
    chip.addEventListener("mouseleave", () => {
      document
        .getElementById(`paragraph-${spot.paragraph_index}`)
        ?.classList.remove("hot-highlight");
    });
    hotSpots.append(chip);
  }

  const reflection = el("div", { class: "reflection" }, [el("h2", { text: "Reading reflection" })]);
  for (const region of report.reflection.engaged) {
    const entry = el("details", {}, [
      el("summary", { text: `p${region.paragraph_index}: ${region.theme}` }),
      el("p", { text: region.summary }),
    ]);
    const bulb = el("button", { class: "lightbulb", text: "\u{1F4A1}" });
    const suggestion = el("p", { class: "suggestion hidden", text: region.suggestion });
    bulb.addEventListener("click", () => suggestion.classList.toggle("hidden"));
    entry.append(bulb, suggestion);
    reflection.append(entry);
  }
  if (report.reflection.underexplored.length > 0) {
    reflection.append(
      el("p", {
        class: "underexplored",
        text: `Underexplored paragraphs: ${report.reflection.underexplored.join(", ")}`,
      }),
    );
  }

  const peers = el("div", { class: "peers" }, [el("h2", { text: "Peer interactions" })]);
  if (report.peer_slices.length === 0) {
    peers.append(el("p", { class: "empty", text: "No peer interactions yet. Reply to someone!" }));
  } else {
    const svg = svgEl("svg", { viewBox: "0 0 100 100", class: "pie" });
    const detail = el("div", { class: "peer-detail" });
    const palette = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1", "#76b7b2"];
    pieSlices(report.peer_slices).forEach((slice, i) => {
      const path = svgEl("path", { d: slice.path, fill: palette[i % palette.length] });
      path.addEventListener("click", () => {
        const source = report.peer_slices[i];
        clear(detail);
        detail.append(
          el("h3", { text: `${slice.peer} (${slice.sharePct.toFixed(1)}%)` }),
          el("p", { text: source.summary }),
          el("p", { class: "suggestion", text: source.suggestion }),
          el("div", {}, source.keywords.map((k) => el("button", { class: "keyword", text: k }))),
        );
      });
      svg.append(path);
    });
    peers.append(svg, detail);
  }

  const history = el("div", { class: "history" }, [el("h2", { text: "Inspiring questions" })]);
  if (report.question_history.length === 0) {
    history.append(el("p", { class: "empty", text: "No questions generated yet." }));
  }
  for (const question of report.question_history) {
    history.append(el("blockquote", { text: `${question.text} [${question.style}]` }));
  }

  page.append(hotSpots, reflection, peers, history);
}

boot().catch((error) => {
  document.body.append(el("pre", { text: String(error) }));
});
