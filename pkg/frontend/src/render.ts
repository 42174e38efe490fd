/**
 * Deterministic 2D SVG rendering of ribbon diagrams.
 *
 * Rings are circles laid out left to right in component order; ribbons are
 * bands between them. Twist markers follow the band's two edges (call the
 * top edge "left", the bottom edge "right" with respect to the chain's
 * propagation direction):
 *
 *  - 0 deg: flat band, parallel edges;
 *  - 180 deg: the edges cross once (achiral bowtie marker);
 *  - +90 deg: chiral crossing, right edge OVER left; the under strand is
 *    drawn broken (strand-gap convention);
 *  - -90 deg: mirror image, right edge UNDER left.
 *
 * The same document always renders to the same string.
 */

import type { DiagramDoc, OutcomePreview, RibbonView, RingView } from "./types.js";

const RING_R = 16;
const RING_SPACING = 84;
const COMPONENT_GAP = 46;
const CY = 64;
const PAD = 28;
const BAND = 7; // half-height of a ribbon band

const COLORS = {
  ring: "#1e3a5f",
  ringFill: "#ffffff",
  decoupledFill: "#d4d4d4",
  decoupledStroke: "#8a8a8a",
  band: "#3b6ea5",
  bandFill: "#dbe7f6",
  badge: "#7a3b05",
  label: "#16324f",
};

const TWIST_BADGE: Record<number, string> = {
  90: "+90° · +i",
  180: "180° · −1",
  270: "−90° · −i",
};

function line(x1: number, y1: number, x2: number, y2: number, dash = ""): string {
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  return `<line x1="${x1}" y1="${y1}" x2="${x2}" y2="${y2}" stroke="${COLORS.band}" stroke-width="2"${dashAttr}/>`;
}

function badge(x: number, y: number, text: string): string {
  return `<text x="${x}" y="${y}" text-anchor="middle" font-size="11" fill="${COLORS.badge}">${text}</text>`;
}

function ribbonSvg(xa: number, xb: number, ribbon: RibbonView): string {
  const top = CY - BAND;
  const bot = CY + BAND;
  const mx = Math.round((xa + xb) / 2);
  const parts: string[] = [
    `<g class="ribbon" data-l="${ribbon.l}" data-r="${ribbon.r}" data-twist="${ribbon.twist}">`,
    `<rect x="${xa}" y="${top}" width="${xb - xa}" height="${2 * BAND}" fill="${COLORS.bandFill}" stroke="none"/>`,
  ];
  if (ribbon.twist === 0) {
    parts.push(line(xa, top, xb, top));
    parts.push(line(xa, bot, xb, bot));
  } else if (ribbon.twist === 180) {
    // full flip: the edges exchange sides through a single achiral pinch
    parts.push(line(xa, top, xb, bot));
    parts.push(line(xa, bot, xb, top));
  } else {
    // chiral quarter twist: one continuous over strand, one broken under strand
    const gap = 7;
    const rightEdgeOver = ribbon.crossing === "over";
    const over = rightEdgeOver ? line(xa, bot, xb, top) : line(xa, top, xb, bot);
    const underY = rightEdgeOver ? [top, bot] : [bot, top];
    const t = (mx - gap - xa) / (xb - xa);
    const u = (mx + gap - xa) / (xb - xa);
    const yAt = (f: number) => Math.round(underY[0] + (underY[1] - underY[0]) * f);
    parts.push(line(xa, underY[0], mx - gap, yAt(t)));
    parts.push(line(mx + gap, yAt(u), xb, underY[1]));
    parts.push(over);
  }
  const label = TWIST_BADGE[ribbon.twist];
  if (label) {
    parts.push(badge(mx, top - 8, label));
  }
  parts.push("</g>");
  return parts.join("");
}

function ringSvg(x: number, ring: RingView): string {
  const decoupled = ring.status === "decoupled";
  const fill = decoupled ? COLORS.decoupledFill : COLORS.ringFill;
  const stroke = decoupled ? COLORS.decoupledStroke : COLORS.ring;
  const dash = decoupled ? ' stroke-dasharray="4 3"' : "";
  const parts = [
    `<g class="ring ${ring.status}" data-id="${ring.id}">`,
    `<circle cx="${x}" cy="${CY}" r="${RING_R}" fill="${fill}" stroke="${stroke}" stroke-width="2"${dash}/>`,
    `<text x="${x}" y="${CY + 4}" text-anchor="middle" font-size="12" fill="${COLORS.label}">${ring.id}</text>`,
  ];
  if (ring.mark !== null) {
    parts.push(badge(x, CY - RING_R - 8, `mark ${ring.mark}°`));
  }
  parts.push("</g>");
  return parts.join("");
}

/** Render a diagram document to a self-contained SVG string. */
export function renderDiagram(doc: DiagramDoc): string {
  const body: string[] = [];
  let x = PAD + RING_R;
  for (const component of doc.components) {
    const positions = new Map<number, number>();
    component.rings.forEach((ring, i) => positions.set(ring.id, x + i * RING_SPACING));
    for (const ribbon of component.ribbons) {
      const xa = (positions.get(ribbon.l) ?? 0) + RING_R;
      const xb = (positions.get(ribbon.r) ?? 0) - RING_R;
      body.push(ribbonSvg(xa, xb, ribbon));
    }
    for (const ring of component.rings) {
      body.push(ringSvg(positions.get(ring.id) ?? 0, ring));
    }
    x += (component.rings.length - 1) * RING_SPACING + RING_R * 2 + COMPONENT_GAP;
  }
  const width = Math.max(x - COMPONENT_GAP + PAD - RING_R, 2 * PAD);
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="128" ` +
    `viewBox="0 0 ${width} 128" font-family="sans-serif">` +
    body.join("") +
    "</svg>"
  );
}

export function formatProbability(p: number): string {
  return p.toFixed(4);
}

/** The what-if panel: both outcome previews, numbers straight from the wire. */
export function renderWhatIfPanel(outcomes: { "+": OutcomePreview; "-": OutcomePreview }): string {
  const sides = (["+", "-"] as const).map((sign) => {
    const preview = outcomes[sign];
    if (!preview.possible) {
      return `<div class="preview"><h4>${sign}</h4><p>impossible (p = ${formatProbability(preview.probability)})</p></div>`;
    }
    const rows = [
      `<h4>${sign}</h4>`,
      `<p>p = ${formatProbability(preview.probability)}</p>`,
    ];
    if (preview.rule) {
      rows.push(`<p>rule ${preview.rule} → ${preview.event?.kind ?? ""}</p>`);
    }
    if (preview.oracle_only) {
      rows.push(`<p>oracle-only step</p>`);
    }
    if (preview.diagram) {
      rows.push(renderDiagram(preview.diagram));
    }
    return `<div class="preview">${rows.join("")}</div>`;
  });
  return `<div class="whatif">${sides.join("")}</div>`;
}
