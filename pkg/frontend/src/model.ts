/**
 * Console view model: a pure reducer over the gateway's stream documents
 * plus local form state. Rendering is a function of this state only, so
 * replaying a recorded document sequence reproduces the identical view.
 */

export type ArchitectureName = "centralized" | "hierarchical" | "holonic";

export interface SnapshotDoc {
  type: "snapshot";
  iteration: number;
  swarm_size: number;
  architecture: ArchitectureName;
  connected: boolean;
  per_drone_energy_w: number;
  total_energy_w: number;
  depleted: number;
}

export interface RecommendationDoc {
  type: "recommendation";
  architecture: ArchitectureName;
  matched_rule: string;
  rationale: string;
  source: string;
  applied: boolean;
  pending: boolean;
}

export interface DecisionDoc {
  type: "decision";
  action: "accept" | "override";
  architecture: ArchitectureName;
  recommended: ArchitectureName;
}

export interface ErrorDoc {
  type: "error";
  message: string;
}

export type StreamDoc = SnapshotDoc | RecommendationDoc | DecisionDoc | ErrorDoc;

export type ConnectionStatus = "idle" | "connecting" | "live" | "disconnected" | "error";

export interface SeriesPoint {
  iteration: number;
  size: number;
  totalEnergy: number;
  connected: boolean;
  architecture: ArchitectureName;
}

export interface LogEntry {
  kind: "snapshot" | "recommendation" | "decision" | "local" | "notice";
  label: string;
  confirmed: boolean;
}

export interface ConsoleState {
  sessionId: string | null;
  connection: ConnectionStatus;
  connectionMessage: string;
  iteration: number;
  architecture: ArchitectureName | null;
  connected: boolean;
  series: SeriesPoint[];
  pending: RecommendationDoc | null;
  log: LogEntry[];
  running: boolean;
  tickMs: number;
}

export function initialState(): ConsoleState {
  return {
    sessionId: null,
    connection: "idle",
    connectionMessage: "",
    iteration: 0,
    architecture: null,
    connected: false,
    series: [],
    pending: null,
    log: [],
    running: false,
    tickMs: 500,
  };
}

const MAX_LOG = 200;

function pushLog(state: ConsoleState, entry: LogEntry): ConsoleState {
  const log = [...state.log, entry];
  return { ...state, log: log.length > MAX_LOG ? log.slice(-MAX_LOG) : log };
}

/** Apply one stream document; never mutates its input. */
export function applyDoc(state: ConsoleState, doc: StreamDoc): ConsoleState {
  switch (doc.type) {
    case "snapshot": {
      const last = state.series[state.series.length - 1];
      let series = state.series;
      if (last === undefined || doc.iteration > last.iteration) {
        series = [
          ...state.series,
          {
            iteration: doc.iteration,
            size: doc.swarm_size,
            totalEnergy: doc.total_energy_w,
            connected: doc.connected,
            architecture: doc.architecture,
          },
        ];
      }
      // a resync snapshot repeating the latest iteration is absorbed
      let next: ConsoleState = {
        ...state,
        series,
        iteration: doc.iteration,
        architecture: doc.architecture,
        connected: doc.connected,
      };
      if (last !== undefined && doc.architecture !== last.architecture) {
        next = pushLog(next, {
          kind: "snapshot",
          label: `architecture now ${doc.architecture} (iteration ${doc.iteration})`,
          confirmed: true,
        });
      }
      return next;
    }
    case "recommendation": {
      const flavor = doc.applied ? "auto-applied" : "pending decision";
      const next = pushLog(state, {
        kind: "recommendation",
        label: `recommendation ${doc.architecture} [${doc.matched_rule}] (${flavor})`,
        confirmed: true,
      });
      return { ...next, pending: doc.pending ? doc : null };
    }
    case "decision": {
      const divergence =
        doc.action === "override" && doc.architecture !== doc.recommended
          ? ` (recommended ${doc.recommended})`
          : "";
      const next = pushLog(state, {
        kind: "decision",
        label: `decision: ${doc.action} ${doc.architecture}${divergence}`,
        confirmed: true,
      });
      return { ...next, pending: null };
    }
    case "error": {
      const next = pushLog(state, {
        kind: "notice",
        label: `stream error: ${doc.message}`,
        confirmed: true,
      });
      return { ...next, connection: "disconnected", connectionMessage: doc.message };
    }
  }
}

export function applyAll(state: ConsoleState, docs: StreamDoc[]): ConsoleState {
  return docs.reduce(applyDoc, state);
}

/** Decision controls are live exactly while a recommendation is pending. */
export function decisionEnabled(state: ConsoleState): boolean {
  return state.pending !== null;
}

export function setConnection(
  state: ConsoleState,
  connection: ConnectionStatus,
  message = "",
): ConsoleState {
  return { ...state, connection, connectionMessage: message };
}

export function attachSession(state: ConsoleState, sessionId: string): ConsoleState {
  return { ...initialState(), sessionId, tickMs: state.tickMs };
}

export function setRunControls(
  state: ConsoleState,
  running: boolean,
  tickMs?: number,
): ConsoleState {
  return { ...state, running, tickMs: tickMs ?? state.tickMs };
}

/** Optimistic log entry for a posted event, pending the server response. */
export function noteLocalEvent(state: ConsoleState, label: string): ConsoleState {
  return pushLog(state, { kind: "local", label, confirmed: false });
}

export function confirmLastLocalEvent(state: ConsoleState): ConsoleState {
  for (let i = state.log.length - 1; i >= 0; i--) {
    const entry = state.log[i];
    if (entry !== undefined && entry.kind === "local" && !entry.confirmed) {
      const log = [...state.log];
      log[i] = { ...entry, confirmed: true };
      return { ...state, log };
    }
  }
  return state;
}

export function clearPendingWithNotice(state: ConsoleState, message: string): ConsoleState {
  return pushLog({ ...state, pending: null }, {
    kind: "notice",
    label: message,
    confirmed: true,
  });
}

// ---- mission / status form validation -----------------------------------

export const SCENARIOS = [
  "search_and_rescue",
  "large_area_mapping",
  "emergency_supply_delivery",
  "post_disaster_assessment",
] as const;
export const STATUSES = ["critical_failure", "idle_state", "spread_out", "overload"] as const;
export const COMM_QUALITIES = ["good", "moderate", "low"] as const;
export const FAILURE_PROBABILITIES = ["low", "moderate", "high"] as const;

export interface MissionForm {
  kind: "task" | "status";
  subject: string;
  commQuality: string;
  failureProbability: string;
}

export interface FormValidation {
  ok: boolean;
  errors: Partial<Record<"subject" | "commQuality" | "failureProbability", string>>;
}

export function validateMissionForm(form: MissionForm): FormValidation {
  const errors: FormValidation["errors"] = {};
  const subjects: readonly string[] = form.kind === "task" ? SCENARIOS : STATUSES;
  if (!subjects.includes(form.subject)) {
    errors.subject = form.kind === "task" ? "select a mission scenario" : "select a swarm status";
  }
  if (!(COMM_QUALITIES as readonly string[]).includes(form.commQuality)) {
    errors.commQuality = "select the communication quality";
  }
  if (!(FAILURE_PROBABILITIES as readonly string[]).includes(form.failureProbability)) {
    errors.failureProbability = "select the failure probability";
  }
  return { ok: Object.keys(errors).length === 0, errors };
}

/** Wire document for a validated mission/status form. */
export function formToEvent(form: MissionForm): Record<string, string> {
  if (form.kind === "task") {
    return {
      type: "assign_task",
      scenario: form.subject,
      comm_quality: form.commQuality,
      failure_probability: form.failureProbability,
    };
  }
  return {
    type: "post_status",
    status: form.subject,
    comm_quality: form.commQuality,
    failure_probability: form.failureProbability,
  };
}
