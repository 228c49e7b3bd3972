// Shapes of the versioned HTTP API responses. The console never
// recomputes anything; every rendered datum is one of these fields.

export interface RankedTicket {
  ticket_id: string;
  score: number;
  per_entity: Record<string, number>;
}

export interface QueryResponse {
  query: string;
  answer: string;
  mode: 'graph' | 'fallback';
  provenance: string[][];
  ranked_tickets: RankedTicket[];
  plan: string | null;
  fallback_reason: string | null;
}

export interface TreeNode {
  section: string;
  text: string;
  parent: string | null;
}

export interface TreeResponse {
  ticket_id: string;
  nodes: TreeNode[];
  edges: string[][];
}

export interface NeighborRow {
  ticket_id: string;
  kind: 'explicit' | 'implicit';
  relation: string;
  weight: number | null;
  direction: 'in' | 'out';
}

export interface NeighborsResponse {
  ticket_id: string;
  neighbors: NeighborRow[];
}

export interface HealthResponse {
  status: string;
  snapshot_version: string;
  tickets: number;
}
