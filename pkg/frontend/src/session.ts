import { ApiError, SessionApi } from "./api.js";
import type {
  Choice,
  CloseResponse,
  CreateOptions,
  RevealView,
  StatsDoc,
  TrialView,
  WaitingView,
} from "./types.js";

export type Phase = "idle" | "awaiting_choice" | "revealed" | "closed";

export interface ClientSessionState {
  phase: Phase;
  sessionId: string | null;
  role: "alice" | "bob";
  experimentMode: "standard" | "nonlocal";
  trial: TrialView | null;
  reveal: RevealView | null;
  stats: StatsDoc | null;
  final: CloseResponse | null;
  waitingFor: "alice" | "bob" | null;
  error: string | null;
}

/**
 * Client-side mirror of the server's per-session phase machine.
 *
 * All state is derived from server responses; the client phase never leads
 * the server's. At most one state-changing request is in flight at a time,
 * so a double click sends nothing. Responses for an older trial than the
 * one on screen are discarded by trial_index comparison, and conflict
 * responses trigger a resync through get_trial/get_stats.
 */
export class ClientSession {
  private state: ClientSessionState = {
    phase: "idle",
    sessionId: null,
    role: "alice",
    experimentMode: "standard",
    trial: null,
    reveal: null,
    stats: null,
    final: null,
    waitingFor: null,
    error: null,
  };
  private token: string | undefined;
  private inFlight = false;

  constructor(private readonly api: SessionApi) {}

  snapshot(): ClientSessionState {
    return { ...this.state };
  }

  get phase(): Phase {
    return this.state.phase;
  }

  async start(options: CreateOptions, token?: "alice" | "bob"): Promise<ClientSessionState> {
    const created = await this.api.createSession(options);
    this.token = token && created.tokens ? created.tokens[token] : undefined;
    const role = options.mode === "human_bob" || token === "bob" ? "bob" : "alice";
    this.state = {
      ...this.state,
      phase: "awaiting_choice",
      sessionId: created.session_id,
      role,
      experimentMode: created.experiment_mode,
      trial:
        role === created.trial.role ? created.trial : null,
      reveal: null,
      stats: null,
      final: null,
      waitingFor: null,
      error: null,
    };
    if (this.state.trial === null) {
      await this.refreshTrial();
    }
    return this.snapshot();
  }

  /** Submit a choice; returns null when the press must be ignored. */
  async submit(choice: Choice): Promise<ClientSessionState | null> {
    if (this.state.phase !== "awaiting_choice" || this.inFlight || !this.state.sessionId) {
      return null;
    }
    const submittedIndex = this.state.trial?.trial_index;
    this.inFlight = true;
    try {
      const outcome = await this.api.submitChoice(this.state.sessionId, choice, this.token);
      if (isWaiting(outcome)) {
        this.state = { ...this.state, waitingFor: outcome.waiting_for, error: null };
      } else if (submittedIndex === undefined || outcome.trial_index === submittedIndex) {
        this.state = {
          ...this.state,
          phase: "revealed",
          reveal: outcome,
          stats: outcome.stats,
          waitingFor: null,
          error: null,
        };
      }
      // a reveal for some other trial index is stale: drop it
      return this.snapshot();
    } catch (error) {
      return this.recover(error);
    } finally {
      this.inFlight = false;
    }
  }

  async advance(): Promise<ClientSessionState | null> {
    if (this.state.phase !== "revealed" || this.inFlight || !this.state.sessionId) {
      return null;
    }
    const lastIndex = this.state.trial?.trial_index ?? -1;
    this.inFlight = true;
    try {
      const view = await this.api.advance(this.state.sessionId, this.token);
      if (view.trial_index > lastIndex) {
        this.state = {
          ...this.state,
          phase: "awaiting_choice",
          trial: view,
          reveal: null,
          waitingFor: null,
          error: null,
        };
      }
      return this.snapshot();
    } catch (error) {
      return this.recover(error);
    } finally {
      this.inFlight = false;
    }
  }

  async refreshTrial(): Promise<ClientSessionState> {
    if (!this.state.sessionId) {
      return this.snapshot();
    }
    const view = await this.api.getTrial(this.state.sessionId, this.token);
    const lastIndex = this.state.trial?.trial_index ?? -1;
    if (view.trial_index >= lastIndex) {
      this.state = { ...this.state, phase: "awaiting_choice", trial: view };
    }
    return this.snapshot();
  }

  async refreshStats(): Promise<ClientSessionState> {
    if (!this.state.sessionId) {
      return this.snapshot();
    }
    this.state = { ...this.state, stats: await this.api.getStats(this.state.sessionId) };
    return this.snapshot();
  }

  async close(): Promise<ClientSessionState> {
    if (!this.state.sessionId) {
      return this.snapshot();
    }
    const final = await this.api.closeSession(this.state.sessionId);
    this.state = { ...this.state, phase: "closed", final, stats: final.final, trial: null };
    return this.snapshot();
  }

  /** Conflict or validation responses put the client back in step with the server. */
  private async recover(error: unknown): Promise<ClientSessionState> {
    if (!(error instanceof ApiError)) {
      throw error;
    }
    if (error.status === 404) {
      this.state = { ...this.state, phase: "closed", error: error.message };
      return this.snapshot();
    }
    this.state = { ...this.state, error: `${error.code}: ${error.message}` };
    if (error.status === 409 && this.state.sessionId) {
      try {
        return await this.refreshTrial();
      } catch (refreshError) {
        if (refreshError instanceof ApiError && refreshError.status === 409) {
          // server already revealed this trial; fetch the shared statistics
          this.state = { ...this.state, phase: "revealed" };
          return this.refreshStats();
        }
        throw refreshError;
      }
    }
    return this.snapshot();
  }
}

function isWaiting(outcome: RevealView | WaitingView): outcome is WaitingView {
  return (outcome as WaitingView).waiting_for !== undefined;
}
