import { ApiError, ConsoleApi } from './api.js';
import {
  renderAnswer,
  renderNeighbors,
  renderRankedTickets,
  renderTree,
} from './render.js';

export interface ConsoleElements {
  form: HTMLFormElement;
  queryInput: HTMLInputElement;
  baseInput: HTMLInputElement;
  tokenInput: HTMLInputElement;
  status: HTMLElement;
  answer: HTMLElement;
  tickets: HTMLElement;
  tree: HTMLElement;
  neighbors: HTMLElement;
}

function grab<T extends HTMLElement>(doc: Document, id: string): T {
  const node = doc.getElementById(id);
  if (!node) throw new Error(`console markup is missing #${id}`);
  return node as T;
}

export function getElements(doc: Document): ConsoleElements {
  return {
    form: grab(doc, 'query-form'),
    queryInput: grab(doc, 'query-input'),
    baseInput: grab(doc, 'base-input'),
    tokenInput: grab(doc, 'token-input'),
    status: grab(doc, 'status-line'),
    answer: grab(doc, 'answer-panel'),
    tickets: grab(doc, 'tickets-panel'),
    tree: grab(doc, 'tree-panel'),
    neighbors: grab(doc, 'neighbors-panel'),
  };
}

function apiFor(els: ConsoleElements): ConsoleApi {
  return new ConsoleApi({
    baseUrl: els.baseInput.value.trim(),
    token: els.tokenInput.value.trim() || undefined,
  });
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `error ${err.status}: ${err.message}`;
  return `error: ${err instanceof Error ? err.message : String(err)}`;
}

export async function selectTicket(els: ConsoleElements, ticketId: string): Promise<void> {
  const api = apiFor(els);
  try {
    const [tree, neighbors] = await Promise.all([
      api.tree(ticketId),
      api.neighbors(ticketId),
    ]);
    renderTree(els.tree, tree);
    renderNeighbors(els.neighbors, neighbors, (id) => void selectTicket(els, id));
  } catch (err) {
    els.status.textContent = describe(err);
  }
}

export async function runQuery(els: ConsoleElements, text: string): Promise<void> {
  const api = apiFor(els);
  els.status.textContent = 'querying…';
  try {
    const payload = await api.query(text);
    renderAnswer(els.answer, payload);
    renderRankedTickets(els.tickets, payload.ranked_tickets, (id) =>
      void selectTicket(els, id),
    );
    els.status.textContent = `answered in ${payload.mode} mode`;
    // pull up the subgraph of the first cited (or best ranked) ticket
    const anchor = payload.provenance[0]?.[0] ?? payload.ranked_tickets[0]?.ticket_id;
    if (anchor) await selectTicket(els, anchor);
  } catch (err) {
    els.status.textContent = describe(err);
  }
}

export async function showHealth(els: ConsoleElements): Promise<void> {
  try {
    const health = await apiFor(els).health();
    els.status.textContent =
      `connected: snapshot ${health.snapshot_version}, ${health.tickets} tickets`;
  } catch (err) {
    els.status.textContent = describe(err);
  }
}

export function initConsole(doc: Document = document): ConsoleElements {
  const els = getElements(doc);
  els.form.addEventListener('submit', (event) => {
    event.preventDefault();
    const text = els.queryInput.value.trim();
    if (text) void runQuery(els, text);
  });
  void showHealth(els);
  return els;
}
