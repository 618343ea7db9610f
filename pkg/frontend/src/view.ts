/**
 * DOM layer. `mountExplorer` builds the shell once, wires the input
 * events to session operations, and repaints from state snapshots; it
 * never talks to the service itself.
 */

import type { Kind } from "./api";
import { curvePathD, PLOT, regimeBands, riskScale, toX, toY, tooltipText } from "./curvePanel";
import type { ExplorerSession, SessionState } from "./session";

export interface ExplorerElements {
  root: HTMLElement;
  banner: HTMLElement;
  editorBody: HTMLElement;
  kindSelect: HTMLSelectElement;
  slider: HTMLInputElement;
  markers: HTMLElement;
  offer: HTMLElement;
  earnings: HTMLElement;
  risk: HTMLElement;
  riskRatio: HTMLElement;
  gaugeFill: HTMLElement;
  bars: HTMLElement;
  curveWrap: HTMLElement;
  tooltip: HTMLElement;
}

export interface ExplorerView {
  elements: ExplorerElements;
  unsubscribe: () => void;
}

const SHELL = `
<div class="explorer">
  <div class="banner" data-role="banner" hidden></div>
  <section class="editor">
    <div data-role="editor-body"></div>
    <label>divergence
      <select data-role="kind">
        <option value="sed">squared Euclidean</option>
        <option value="kl">Kullback-Leibler</option>
        <option value="isd">Itakura-Saito</option>
      </select>
    </label>
  </section>
  <section class="offer">
    <div class="slider-markers" data-role="markers"></div>
    <input type="range" data-role="slider" min="0" max="1" step="0.0001" />
    <dl class="readouts">
      <dt>offer</dt><dd data-role="offer">–</dd>
      <dt>earnings</dt><dd data-role="earnings">–</dd>
      <dt>risk</dt><dd data-role="risk">–</dd>
      <dt>of full disclosure</dt><dd data-role="risk-ratio">–</dd>
    </dl>
    <div class="gauge"><div class="gauge-fill" data-role="gauge-fill"></div></div>
  </section>
  <section class="bars" data-role="bars"></section>
  <section class="curve">
    <div class="curve-wrap" data-role="curve"></div>
    <div class="curve-tooltip" data-role="tooltip" hidden></div>
  </section>
</div>
`;

function grab<T extends Element>(root: HTMLElement, role: string): T {
  const el = root.querySelector(`[data-role="${role}"]`);
  if (!el) throw new Error(`missing shell element ${role}`);
  return el as T;
}

export function mountExplorer(root: HTMLElement, session: ExplorerSession): ExplorerView {
  root.innerHTML = SHELL;
  const elements: ExplorerElements = {
    root,
    banner: grab(root, "banner"),
    editorBody: grab(root, "editor-body"),
    kindSelect: grab(root, "kind"),
    slider: grab(root, "slider"),
    markers: grab(root, "markers"),
    offer: grab(root, "offer"),
    earnings: grab(root, "earnings"),
    risk: grab(root, "risk"),
    riskRatio: grab(root, "risk-ratio"),
    gaugeFill: grab(root, "gauge-fill"),
    bars: grab(root, "bars"),
    curveWrap: grab(root, "curve"),
    tooltip: grab(root, "tooltip"),
  };

  buildEditor(elements.editorBody, session);
  wireInputs(elements, session);

  const repaint = (state: SessionState) => render(elements, session, state);
  const unsubscribe = session.subscribe(repaint);
  repaint(session.getState());

  if (session.getState().draft.categories.length === 0) {
    // nothing to solve for; an empty draft disables the whole panel
    (root.firstElementChild as HTMLElement).classList.add("disabled");
    elements.slider.disabled = true;
    elements.kindSelect.disabled = true;
  }
  return { elements, unsubscribe };
}

function wireInputs(elements: ExplorerElements, session: ExplorerSession): void {
  elements.slider.addEventListener("input", () => {
    session.setOffer(Number.parseFloat(elements.slider.value));
  });
  elements.kindSelect.addEventListener("change", () => {
    session.setKind(elements.kindSelect.value as Kind);
  });
  elements.editorBody.addEventListener("change", (ev) => {
    const input = ev.target as HTMLInputElement;
    const { field, index } = input.dataset;
    if (field === undefined || index === undefined) return;
    const i = Number.parseInt(index, 10);
    if (field === "categories") session.editCategory(i, input.value);
    else if (field === "w") session.editRate(i, Number.parseFloat(input.value));
    else if (field === "q" || field === "p") session.editProbability(field, i, Number.parseFloat(input.value));
  });
  elements.curveWrap.addEventListener("mousemove", (ev) => {
    const curve = session.getState().curve;
    const rect = elements.curveWrap.getBoundingClientRect();
    if (!curve || rect.width <= 0) return;
    const frac = Math.min(Math.max(((ev as MouseEvent).clientX - rect.left) / rect.width, 0), 1);
    elements.tooltip.textContent = tooltipText(curve, frac * curve.mu_max);
    elements.tooltip.hidden = false;
  });
  elements.curveWrap.addEventListener("mouseleave", () => {
    elements.tooltip.hidden = true;
  });
}

function buildEditor(body: HTMLElement, session: ExplorerSession): void {
  const { draft } = session.getState();
  body.textContent = "";
  draft.categories.forEach((name, i) => {
    const row = document.createElement("div");
    row.className = "editor-row";
    row.dataset.index = String(i);
    const nameInput = document.createElement("input");
    nameInput.type = "text";
    nameInput.value = name;
    nameInput.dataset.field = "categories";
    nameInput.dataset.index = String(i);
    row.appendChild(nameInput);
    for (const field of ["q", "p", "w"] as const) {
      const label = document.createElement("label");
      label.textContent = field;
      const input = document.createElement("input");
      input.type = "number";
      input.step = "0.001";
      input.value = String(draft[field][i]);
      input.dataset.field = field;
      input.dataset.index = String(i);
      label.appendChild(input);
      row.appendChild(label);
    }
    const err = document.createElement("span");
    err.className = "field-error";
    err.dataset.errorIndex = String(i);
    err.hidden = true;
    row.appendChild(err);
    body.appendChild(row);
  });
}

function render(elements: ExplorerElements, session: ExplorerSession, state: SessionState): void {
  renderBanner(elements, state);
  renderEditor(elements, state);
  renderSlider(elements, session, state);
  renderReadouts(elements, state);
  renderBars(elements, state);
  renderCurve(elements, state);
}

function renderBanner(elements: ExplorerElements, state: SessionState): void {
  if (state.banner === null) {
    elements.banner.hidden = true;
    elements.banner.textContent = "";
  } else {
    elements.banner.hidden = false;
    elements.banner.textContent = `${state.banner.code}: ${state.banner.message}`;
  }
}

function renderEditor(elements: ExplorerElements, state: SessionState): void {
  const inputs = elements.editorBody.querySelectorAll<HTMLInputElement>("input[data-field]");
  for (const input of inputs) {
    const field = input.dataset.field as "categories" | "q" | "p" | "w";
    const i = Number.parseInt(input.dataset.index ?? "0", 10);
    const hasError = state.fieldErrors.some((e) => e.field === field && e.index === i);
    // keep rejected text visible next to its message; sync the rest
    if (input !== document.activeElement && !hasError) {
      input.value = String(state.draft[field][i]);
    }
  }
  const rows = elements.editorBody.querySelectorAll<HTMLElement>(".editor-row");
  rows.forEach((row, i) => {
    const span = row.querySelector<HTMLElement>(".field-error");
    if (!span) return;
    const err = state.fieldErrors.find((e) => e.index === i);
    span.hidden = err === undefined;
    span.textContent = err === undefined ? "" : `${err.field}: ${err.message}`;
  });
}

function renderSlider(elements: ExplorerElements, session: ExplorerSession, state: SessionState): void {
  elements.slider.max = String(session.muMax);
  elements.slider.value = String(state.mu);
  const ticks = thresholdTicks(state);
  elements.markers.textContent = "";
  for (const value of ticks) {
    const tick = document.createElement("span");
    tick.className = "marker";
    tick.title = value.toFixed(4);
    tick.style.left = `${((value / session.muMax) * 100).toFixed(3)}%`;
    elements.markers.appendChild(tick);
  }
}

/** Regime-boundary offers worth marking on the slider track. */
function thresholdTicks(state: SessionState): number[] {
  const table = state.thresholds;
  if (table === null) return [];
  const raw: number[] = [];
  for (const v of table.n3 ?? []) {
    if (v !== null) raw.push(v);
  }
  for (const cell of table.cells) {
    if (!cell.covered) continue;
    if (cell.mu_lo !== null) raw.push(cell.mu_lo);
    if (cell.mu_hi !== null) raw.push(cell.mu_hi);
  }
  const seen = new Set<string>();
  const ticks: number[] = [];
  for (const v of raw) {
    const key = v.toFixed(9);
    if (v <= 0 || v >= table.mu_max || seen.has(key)) continue;
    seen.add(key);
    ticks.push(v);
  }
  return ticks.sort((a, b) => a - b);
}

function renderReadouts(elements: ExplorerElements, state: SessionState): void {
  const solve = state.solve;
  if (solve === null) {
    for (const el of [elements.offer, elements.earnings, elements.risk, elements.riskRatio]) el.textContent = "–";
    elements.gaugeFill.style.width = "0%";
    return;
  }
  elements.offer.textContent = solve.mu.toFixed(4);
  elements.earnings.textContent = (state.earnings ?? 0).toFixed(4);
  elements.risk.textContent = solve.risk.toFixed(4);
  elements.riskRatio.textContent = `${(solve.risk_ratio * 100).toFixed(1)}%`;
  elements.gaugeFill.style.width = `${(solve.risk_ratio * 100).toFixed(1)}%`;
}

function renderBars(elements: ExplorerElements, state: SessionState): void {
  elements.bars.textContent = "";
  const solve = state.solve;
  const draft = state.solveDraft;
  if (solve === null || draft === null) return;
  draft.categories.forEach((name, i) => {
    const row = document.createElement("div");
    row.className = "category-row";
    row.dataset.index = String(i);
    row.dataset.activity = solve.activity[i];
    if (solve.activity[i] === "ONE") row.classList.add("fully-disclosed");

    const label = document.createElement("span");
    label.className = "category-name";
    label.textContent = name;
    row.appendChild(label);

    const track = document.createElement("div");
    track.className = "bar-track";
    const fill = document.createElement("div");
    fill.className = "bar-fill";
    fill.style.width = `${(solve.delta[i] * 100).toFixed(2)}%`;
    track.appendChild(fill);
    row.appendChild(track);

    const endpoints = document.createElement("span");
    endpoints.className = "bar-endpoints";
    endpoints.textContent =
      `p ${draft.p[i].toFixed(4)} → t ${solve.t[i].toFixed(4)} → q ${draft.q[i].toFixed(4)}`;
    row.appendChild(endpoints);

    elements.bars.appendChild(row);
  });
}

function renderCurve(elements: ExplorerElements, state: SessionState): void {
  const curve = state.curve;
  if (curve === null) {
    elements.curveWrap.innerHTML = "";
    elements.curveWrap.classList.add("empty");
    return;
  }
  elements.curveWrap.classList.remove("empty");
  const riskMax = riskScale(curve);
  const parts: string[] = [];
  regimeBands(curve).forEach((band, i) => {
    const x0 = toX(band.from, curve.mu_max);
    const x1 = toX(band.to, curve.mu_max);
    parts.push(
      `<rect class="regime regime-${i % 2}" x="${x0.toFixed(2)}" y="${PLOT.padY}" ` +
        `width="${(x1 - x0).toFixed(2)}" height="${PLOT.height - 2 * PLOT.padY}"></rect>`,
    );
  });
  for (const bp of curve.breakpoints) {
    const x = toX(bp, curve.mu_max).toFixed(2);
    parts.push(
      `<line class="breakpoint" x1="${x}" y1="${PLOT.padY}" x2="${x}" y2="${PLOT.height - PLOT.padY}"></line>`,
    );
  }
  parts.push(`<path class="curve-path" fill="none" d="${curvePathD(curve)}"></path>`);
  const solve = state.solve;
  if (solve !== null && solve.instance_digest === curve.instance_digest) {
    const cx = toX(solve.mu, curve.mu_max).toFixed(2);
    const cy = toY(solve.risk, riskMax).toFixed(2);
    parts.push(`<circle class="operating-point" cx="${cx}" cy="${cy}" r="4"></circle>`);
  }
  elements.curveWrap.innerHTML =
    `<svg viewBox="0 0 ${PLOT.width} ${PLOT.height}" width="100%">${parts.join("")}</svg>`;
}
