/**
 * Typed client for the muwb session protocol (docs/protocol.md).
 *
 * One message in flight at a time: sends are queued so the server sees
 * a strictly serialized command stream per client, matching the UI
 * rule of disabling controls while a reply is pending.
 */

export interface SpanPayload {
  start: number;
  end: number;
  line: number;
  column: number;
}

export interface ErrorPayload {
  kind: string;
  message: string;
  reason?: string;
  span?: SpanPayload;
  step?: number;
}

export interface HypothesisPayload {
  label: string;
  formula: string;
}

export interface GoalPayload {
  hypotheses: HypothesisPayload[];
  conclusion: string;
}

export interface StatePayload {
  lemma: string;
  proved: boolean;
  goal_count: number;
  goals: GoalPayload[];
  display: string;
  history_depth: number;
  steps: string[];
}

export interface TacticInfo {
  name: string;
  applicable: boolean;
  needs_argument: boolean;
  reason: string | null;
}

export interface OkReply {
  ok: true;
  session?: string;
  state?: StatePayload;
  tactics?: TacticInfo[];
  script?: string;
  formula?: string;
  stopped_at?: number | null;
  lemma?: string;
  sequent?: string;
  steps?: number;
  rules?: string[];
}

export interface ErrReply {
  ok: false;
  error: ErrorPayload;
  session?: string;
  state?: StatePayload;
  stopped_at?: number | null;
}

export type Reply = OkReply | ErrReply;

export type FetchLike = (input: string, init: RequestInit) => Promise<Response>;

export class ProtocolClient {
  private queue: Promise<unknown> = Promise.resolve();

  constructor(
    readonly endpoint: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  /** Queue a message; resolves with the reply, rejects on transport failure. */
  send(message: Record<string, unknown>): Promise<Reply> {
    const run = async (): Promise<Reply> => {
      const response = await this.fetchFn(this.endpoint, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(message),
      });
      return (await response.json()) as Reply;
    };
    const turn = this.queue.then(run, run);
    this.queue = turn.then(
      () => undefined,
      () => undefined,
    );
    return turn;
  }

  newSession(lemma: string, sequent: string, variables: string[]): Promise<Reply> {
    return this.send({ cmd: "new", lemma, sequent, variables });
  }

  tactic(session: string, tactic: string): Promise<Reply> {
    return this.send({ cmd: "tactic", session, tactic });
  }

  state(session: string): Promise<Reply> {
    return this.send({ cmd: "state", session });
  }

  undo(session: string): Promise<Reply> {
    return this.send({ cmd: "undo", session });
  }

  applicable(session: string): Promise<Reply> {
    return this.send({ cmd: "applicable", session });
  }

  qed(session: string): Promise<Reply> {
    return this.send({ cmd: "qed", session });
  }

  script(session: string): Promise<Reply> {
    return this.send({ cmd: "script", session });
  }

  importScript(script: string): Promise<Reply> {
    return this.send({ cmd: "import", script });
  }

  parseFormula(session: string, formula: string): Promise<Reply> {
    return this.send({ cmd: "parse", session, formula });
  }
}
