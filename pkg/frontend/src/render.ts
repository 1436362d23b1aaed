/** DOM rendering of the view-models. Display-only: every figure string was
 * prepared by the view-model layer from verbatim service values. */

import type { LayoutDoc, ModelDocument } from "./types.js";
import type { AppView } from "./controller.js";
import type { ScenarioPanelState } from "./state.js";
import { AS_IS, TO_BE } from "./state.js";
import type { NodeAnnotation, NodeDetail } from "./viewmodel.js";

const BAND_COLORS: Record<string, string> = {
  low: "#c0392b",
  mid: "#b8860b",
  high: "#2e7d32",
};

function escapeHtml(value: string): string {
  return value
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderGraph(
  container: HTMLElement,
  layout: LayoutDoc,
  annotations: NodeAnnotation[],
): void {
  const byId = new Map(annotations.map((a) => [a.id, a]));
  const boxW = layout.box.width;
  const boxH = layout.box.height;
  const xs = layout.nodes.map((n) => n.x);
  const ys = layout.nodes.map((n) => n.y);
  const minX = xs.length ? Math.min(...xs) : 0;
  const maxX = xs.length ? Math.max(...xs) : 0;
  const maxY = ys.length ? Math.max(...ys) : 0;
  const margin = 70;
  const width = maxX - minX + boxW + 2 * margin;
  const height = maxY + boxH + 2 * margin;
  const px = (x: number) => x - minX + boxW / 2 + margin;
  const py = (y: number) => maxY - y + boxH / 2 + margin;

  const parts: string[] = [];
  parts.push(
    `<svg viewBox="0 0 ${width} ${height}" width="${width}" height="${height}" ` +
      `xmlns="http://www.w3.org/2000/svg">`,
    `<defs><marker id="ar" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="7" ` +
      `markerHeight="7" orient="auto-start-reverse">` +
      `<path d="M 0 0 L 10 5 L 0 10 z" fill="#666"/></marker></defs>`,
  );
  for (const edge of layout.edges) {
    const points = edge.points.map(([x, y]) => [px(x), py(y)] as const);
    if (points.length >= 2) {
      points[0] = [points[0][0], points[0][1] - boxH / 2];
      points[points.length - 1] = [
        points[points.length - 1][0],
        points[points.length - 1][1] + boxH / 2,
      ];
    }
    const path = points.map(([x, y]) => `${x},${y}`).join(" ");
    parts.push(
      `<polyline points="${path}" fill="none" stroke="#666" stroke-width="1.5" ` +
        `marker-end="url(#ar)"/>`,
    );
  }
  for (const node of layout.nodes) {
    if (node.dummy) continue;
    const cx = px(node.x);
    const cy = py(node.y);
    const annotation = byId.get(node.id);
    const shape =
      node.kind === "task"
        ? `<polygon points="${hexagon(cx, cy, boxW, boxH)}" fill="#dce9f7" stroke="#2c5d8f"/>`
        : `<rect x="${cx - boxW / 2}" y="${cy - boxH / 2}" width="${boxW}" height="${boxH}" ` +
          `rx="12" fill="${annotation?.satisfied === false ? "#fdecea" : "#eef7e9"}" ` +
          `stroke="#3c7a3c"/>`;
    const badge = annotation?.badge
      ? `<text x="${cx}" y="${cy + boxH / 2 + 14}" text-anchor="middle" font-size="11" ` +
        `fill="${annotation.satisfied ? "#2e7d32" : "#c0392b"}">${escapeHtml(annotation.badge)}</text>`
      : "";
    const level =
      annotation && annotation.kind === "goal"
        ? `<text x="${cx}" y="${cy + 14}" text-anchor="middle" font-size="11" fill="#333">` +
          `${escapeHtml(annotation.levelText)}</text>`
        : annotation?.state
          ? `<text x="${cx}" y="${cy + 14}" text-anchor="middle" font-size="11" fill="#333">` +
            `${escapeHtml(annotation.state)}</text>`
          : "";
    const confidence = annotation
      ? `<text x="${cx + boxW / 2 - 6}" y="${cy - boxH / 2 + 12}" text-anchor="end" ` +
        `font-size="9" fill="${BAND_COLORS[annotation.confidenceBand]}">` +
        `c=${escapeHtml(annotation.confidenceText)}${annotation.extrapolated ? " ⚠" : ""}</text>`
      : "";
    parts.push(
      `<g class="node" data-node="${escapeHtml(node.id)}" style="cursor:pointer">`,
      shape,
      `<text x="${cx}" y="${cy - 2}" text-anchor="middle" font-size="11" font-weight="bold" ` +
        `fill="#111">${escapeHtml(node.id)}</text>`,
      level,
      confidence,
      badge,
      `</g>`,
    );
  }
  parts.push("</svg>");
  container.innerHTML = parts.join("");
}

function hexagon(cx: number, cy: number, w: number, h: number): string {
  const notch = h / 2;
  return [
    [cx - w / 2 + notch, cy - h / 2],
    [cx + w / 2 - notch, cy - h / 2],
    [cx + w / 2, cy],
    [cx + w / 2 - notch, cy + h / 2],
    [cx - w / 2 + notch, cy + h / 2],
    [cx - w / 2, cy],
  ]
    .map(([x, y]) => `${x},${y}`)
    .join(" ");
}

export function renderScenarioPanel(
  container: HTMLElement,
  panel: ScenarioPanelState,
  inlineErrorSubject: string | null,
): void {
  const rows: string[] = [];
  rows.push(
    `<label>Usage profile <select id="profile-select">` +
      panel.profiles
        .map(
          (p) =>
            `<option value="${escapeHtml(p)}"${p === panel.profile ? " selected" : ""}>` +
            `${escapeHtml(p)}</option>`,
        )
        .join("") +
      `</select></label>`,
  );
  for (const task of panel.tasks) {
    const marked = task.id === inlineErrorSubject ? " control-error" : "";
    if (task.kind === "functional") {
      rows.push(
        `<div class="task-control${marked}"><span class="task-name">` +
          `${escapeHtml(task.id)} — ${escapeHtml(task.name)}</span>` +
          `<label><input type="radio" name="task-${escapeHtml(task.id)}" value="${AS_IS}"` +
          `${task.state === AS_IS ? " checked" : ""} data-task="${escapeHtml(task.id)}"> As-Is</label>` +
          `<label><input type="radio" name="task-${escapeHtml(task.id)}" value="${TO_BE}"` +
          `${task.state === TO_BE ? " checked" : ""} data-task="${escapeHtml(task.id)}"> To-Be</label>` +
          `</div>`,
      );
    } else {
      rows.push(
        `<div class="task-control${marked}"><span class="task-name">` +
          `${escapeHtml(task.id)} — ${escapeHtml(task.name)}</span>` +
          `<input type="range" min="${task.min}" max="${task.max}" step="any" ` +
          `value="${task.level}" data-task="${escapeHtml(task.id)}">` +
          `<output>${task.level}</output></div>`,
      );
    }
  }
  rows.push(`<button id="apply-btn">Apply scenario</button>`);
  container.innerHTML = rows.join("");
}

export function renderView(root: Document, view: AppView): void {
  const banner = root.getElementById("banner");
  if (banner) {
    banner.textContent = view.banner ?? "";
    banner.style.display = view.banner ? "block" : "none";
  }
  const inlineError = root.getElementById("inline-error");
  if (inlineError) {
    inlineError.textContent = view.inlineError?.message ?? "";
    inlineError.style.display = view.inlineError ? "block" : "none";
  }

  const objectives = root.getElementById("objectives");
  if (objectives) {
    objectives.innerHTML = view.objectives
      .map(
        (row) =>
          `<div class="objective ${row.satisfied ? "ok" : "fail"}">` +
          `<strong>${escapeHtml(row.goal)}</strong> ${escapeHtml(row.name)}: ` +
          `${escapeHtml(row.attainedText)} / ${escapeHtml(row.glyph)}${escapeHtml(row.magnitudeText)} ` +
          `${row.satisfied ? "✓" : "✗"} <small>degree ${escapeHtml(row.degreeText)}</small></div>`,
      )
      .join("");
  }

  const utility = root.getElementById("utility");
  if (utility) {
    if (view.utilityPanel) {
      const gauges = view.utilityPanel.gauges
        .map(
          (g) =>
            `<div class="gauge"><span>${escapeHtml(g.stakeholder)}</span>` +
            `<meter min="0" max="1" value="${g.value}"></meter>` +
            `<code data-gauge="${escapeHtml(g.stakeholder)}">${escapeHtml(g.valueText)}</code></div>`,
        )
        .join("");
      const warnings = view.utilityPanel.perGoal
        .filter((g) => g.disagreementWarning)
        .map((g) => `<div class="warn">stakeholders disagree on ${escapeHtml(g.goal)}</div>`)
        .join("");
      utility.innerHTML =
        `<div class="gauge aggregate"><span>aggregate</span>` +
        `<meter min="0" max="1" value="${view.utilityPanel.aggregate}"></meter>` +
        `<code data-gauge="aggregate">${escapeHtml(view.utilityPanel.aggregateText)}</code></div>` +
        gauges +
        warnings;
    } else {
      utility.innerHTML = "";
    }
  }

  const diff = root.getElementById("diff");
  if (diff) {
    const rows = view.diffRows
      .map(
        (row) =>
          `<tr class="${row.changed ? "changed" : ""}"><td>${escapeHtml(row.node)}</td>` +
          `<td>${escapeHtml(row.beforeText)}</td><td>${escapeHtml(row.afterText)}</td>` +
          `<td>${escapeHtml(row.deltaText)}</td></tr>`,
      )
      .join("");
    diff.innerHTML =
      (view.crossProfile ? `<div class="warn">cross-profile comparison</div>` : "") +
      `<table><thead><tr><th>node</th><th>before</th><th>after</th><th>Δ</th></tr></thead>` +
      `<tbody>${rows}</tbody></table>`;
  }

  const mc = root.getElementById("mc-results");
  if (mc) {
    if (view.mcBusy) {
      mc.innerHTML = `<div class="progress">sampling… <button id="mc-cancel">cancel</button></div>`;
    } else if (view.mcPanel) {
      const rows = view.mcPanel.rows
        .map(
          (row) =>
            `<tr><td>${escapeHtml(row.node)}</td><td>${escapeHtml(row.p05Text)}</td>` +
            `<td>${escapeHtml(row.p50Text)}</td><td>${escapeHtml(row.p95Text)}</td>` +
            `<td>${row.pSatisfiedText === null ? "–" : escapeHtml(row.pSatisfiedText)}</td></tr>`,
        )
        .join("");
      mc.innerHTML =
        `<p>${escapeHtml(view.mcPanel.runsText)} runs, seed ${escapeHtml(view.mcPanel.seedText)}</p>` +
        `<table><thead><tr><th>node</th><th>p05</th><th>p50</th><th>p95</th>` +
        `<th>P(satisfied)</th></tr></thead><tbody>${rows}</tbody></table>`;
    } else {
      mc.innerHTML = "";
    }
  }
}

export function renderNodeDetail(container: HTMLElement, detail: NodeDetail | null): void {
  if (!detail) {
    container.innerHTML = "";
    container.style.display = "none";
    return;
  }
  const objective = detail.objective
    ? `<h4>Objective</h4><dl>` +
      detail.objective
        .map((f) => `<dt>${escapeHtml(f.label)}</dt><dd>${escapeHtml(f.value)}</dd>`)
        .join("") +
      `</dl>`
    : "";
  container.innerHTML =
    `<button id="detail-close">×</button>` +
    `<h3>${escapeHtml(detail.id)} — ${escapeHtml(detail.name)}</h3>` +
    `<p>${escapeHtml(detail.description)}</p>` +
    `<h4>Rationale</h4><p>${escapeHtml(detail.rationale)}</p>` +
    objective;
  container.style.display = "block";
}
