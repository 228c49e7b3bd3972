// DOM builders, one per panel. Pure: payload in, elements out, no
// fetching and no arithmetic on API values beyond display formatting.

import type {
  NeighborsResponse,
  QueryResponse,
  RankedTicket,
  TreeNode,
  TreeResponse,
} from './types.js';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function modeBadge(mode: string): HTMLSpanElement {
  return el('span', `badge mode-${mode}`, mode);
}

export function renderAnswer(container: HTMLElement, payload: QueryResponse): void {
  container.replaceChildren();

  const head = el('div', 'answer-head');
  head.appendChild(modeBadge(payload.mode));
  for (const pair of payload.provenance) {
    const [ticketId, section] = pair;
    head.appendChild(el('span', 'provenance-chip', `${ticketId} / ${section}`));
  }
  container.appendChild(head);

  container.appendChild(el('div', 'answer-text', payload.answer));

  if (payload.fallback_reason) {
    container.appendChild(
      el('div', 'fallback-reason', `fallback: ${payload.fallback_reason}`),
    );
  }
  if (payload.plan) {
    const plan = el('pre', 'plan');
    plan.textContent = payload.plan;
    container.appendChild(plan);
  }
}

export function renderRankedTickets(
  container: HTMLElement,
  tickets: RankedTicket[],
  onSelect: (ticketId: string) => void,
): void {
  container.replaceChildren();
  if (tickets.length === 0) {
    container.appendChild(el('div', 'empty', 'no ranked tickets'));
    return;
  }
  const list = el('ol', 'ticket-list');
  for (const ticket of tickets) {
    const item = el('li');
    const button = el('button', 'ticket-row');
    button.dataset.ticketId = ticket.ticket_id;
    button.dataset.score = String(ticket.score);
    button.appendChild(el('span', 'ticket-id', ticket.ticket_id));
    button.appendChild(el('span', 'ticket-score', ticket.score.toFixed(4)));
    const parts = Object.entries(ticket.per_entity)
      .map(([section, value]) => `${section}=${value.toFixed(3)}`)
      .join('  ');
    if (parts) button.title = parts;
    button.addEventListener('click', () => onSelect(ticket.ticket_id));
    item.appendChild(button);
    list.appendChild(item);
  }
  container.appendChild(list);
}

function subtree(byParent: Map<string | null, TreeNode[]>, node: TreeNode): HTMLLIElement {
  const item = el('li', 'tree-node');
  item.appendChild(el('span', 'section-name', node.section));
  item.appendChild(el('span', 'section-text', node.text));
  const children = byParent.get(node.section) ?? [];
  if (children.length > 0) {
    const list = el('ul', 'tree-children');
    for (const child of children) list.appendChild(subtree(byParent, child));
    item.appendChild(list);
  }
  return item;
}

export function renderTree(container: HTMLElement, payload: TreeResponse): void {
  container.replaceChildren();
  container.appendChild(el('h3', 'panel-title', `ticket ${payload.ticket_id}`));

  const byParent = new Map<string | null, TreeNode[]>();
  for (const node of payload.nodes) {
    const siblings = byParent.get(node.parent) ?? [];
    siblings.push(node);
    byParent.set(node.parent, siblings);
  }
  const roots = byParent.get(null) ?? [];
  const list = el('ul', 'tree');
  for (const root of roots) list.appendChild(subtree(byParent, root));
  container.appendChild(list);
}

export function renderNeighbors(
  container: HTMLElement,
  payload: NeighborsResponse,
  onSelect: (ticketId: string) => void,
): void {
  container.replaceChildren();
  container.appendChild(el('h3', 'panel-title', 'neighbors'));
  if (payload.neighbors.length === 0) {
    container.appendChild(el('div', 'empty', 'no linked tickets'));
    return;
  }
  const list = el('ul', 'neighbor-list');
  for (const row of payload.neighbors) {
    const item = el('li', `neighbor edge-${row.kind}`);
    item.appendChild(el('span', 'direction', row.direction === 'out' ? '→' : '←'));
    const button = el('button', 'neighbor-id', row.ticket_id);
    button.addEventListener('click', () => onSelect(row.ticket_id));
    item.appendChild(button);
    item.appendChild(el('span', 'relation', row.relation));
    const kindLabel =
      row.weight === null ? row.kind : `${row.kind} · cosine ${row.weight.toFixed(3)}`;
    item.appendChild(el('span', 'kind', kindLabel));
    list.appendChild(item);
  }
  container.appendChild(list);
}
