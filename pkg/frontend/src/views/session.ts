// ── Session view: partner table, operation list, model log ──────────────────

import type { ModelLogEntry, OperationRecord, PredictionRow, StrategyReport } from "../api.js";
import { highlightColor } from "../palette.js";

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

/** Top-50 partner table; correctly predicted partners use the correct color. */
export function renderPartnerTable(rows: PredictionRow[], tagged: string[]): string {
  const body = rows
    .map((r) => {
      const style = r.correct ? ` style="color:${highlightColor("correct")}"` : "";
      const sel = tagged.includes(r.partner) ? ` class="tagged"` : "";
      return (
        `<tr data-partner="${esc(r.partner)}"${sel}>` +
        `<td${style}>${esc(r.name)}</td>` +
        `<td>${r.score.toFixed(4)}</td>` +
        `<td>${r.rank}</td></tr>`
      );
    })
    .join("");
  return (
    `<table class="partner-table"><thead>` +
    `<tr><th>Name</th><th>Score</th><th>Rank</th></tr></thead>` +
    `<tbody>${body}</tbody></table>`
  );
}

/** Pending strategies with checkboxes/delete, then the committed records. */
export function renderOperationList(
  pending: StrategyReport[],
  operations: OperationRecord[],
): string {
  const pendingItems = pending
    .map(
      (s) =>
        `<li class="pending" data-strategy="${s.id}">` +
        `<input type="checkbox" checked data-check="${s.id}">` +
        `<code>${esc(s.strategy.anchor.head)}-${esc(s.strategy.anchor.relation)}-` +
        `${esc(s.strategy.anchor.tail)}</code> <b>${esc(s.strategy.pattern)}</b>` +
        ` <span class="count">${s.lattice.counts[s.strategy.pattern]} matches</span>` +
        `<button data-drop="${s.id}">x</button></li>`,
    )
    .join("");
  const committed = operations
    .map(
      (op) =>
        `<li class="operation" data-operation="${op.id}">#${op.id} deleted ` +
        `${op.total_deleted} (${(op.fraction_deleted * 100).toFixed(2)}%)` +
        (op.model_version ? ` -> model v${op.model_version}` : "") +
        `<details><summary>note</summary>` +
        `<textarea data-note="${op.id}">${esc(op.note)}</textarea></details></li>`,
    )
    .join("");
  return (
    `<ul class="operation-list">${pendingItems}${committed}</ul>` +
    `<button id="confirm-strategies"${pending.length ? "" : " disabled"}>confirm</button>`
  );
}

const METRIC_COLORS: Record<string, string> = {
  precision: "#4e79a7",
  recall: "#f28e2b",
  ndcg: "#59a14f",
};

/** Grouped horizontal bars per model, newest last; click a group to activate. */
export function renderModelLog(models: ModelLogEntry[]): string {
  const groups = models
    .map((m) => {
      const bars = Object.entries(m.metrics)
        .sort(([a], [b]) => a.localeCompare(b))
        .map(([key, value]) => {
          const kind = key.split("@")[0];
          const color = METRIC_COLORS[kind] ?? "#999";
          return (
            `<div class="bar" title="${esc(key)}=${value.toFixed(3)}">` +
            `<span class="fill" style="width:${(value * 100).toFixed(1)}%;` +
            `background:${color}"></span></div>`
          );
        })
        .join("");
      return (
        `<div class="model${m.active ? " active" : ""}" data-model="${m.version}">` +
        `<span class="label">v${m.version}${m.active ? " (active)" : ""}</span>${bars}</div>`
      );
    })
    .join("");
  return `<div class="model-log">${groups}</div>`;
}
