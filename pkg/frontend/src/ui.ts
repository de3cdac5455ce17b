/**
 * DOM wiring: three panels (mission control, live telemetry, event log)
 * rendered from the view model. The DOM is rewritten from state on every
 * change; there is no simulation logic on this side of the wire.
 */

import {
  COMM_QUALITIES,
  FAILURE_PROBABILITIES,
  SCENARIOS,
  STATUSES,
  applyDoc,
  attachSession,
  clearPendingWithNotice,
  confirmLastLocalEvent,
  decisionEnabled,
  formToEvent,
  initialState,
  noteLocalEvent,
  setConnection,
  setRunControls,
  validateMissionForm,
  type ConsoleState,
  type MissionForm,
  type StreamDoc,
} from "./model.js";
import {
  createSession,
  getSessionState,
  postEvent,
  subscribeWithRetry,
  type GatewayError,
} from "./client.js";
import { renderTelemetry } from "./charts.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

export class Console {
  state: ConsoleState = initialState();
  private abort: AbortController | null = null;

  constructor(private baseUrl: string) {}

  private update(next: ConsoleState): void {
    this.state = next;
    this.render();
  }

  private ingest(doc: StreamDoc): void {
    this.update(applyDoc(this.state, doc));
  }

  async createAndConnect(policy: string, mode: string, tickMs: number): Promise<void> {
    try {
      const created = await createSession(this.baseUrl, {
        mode,
        policy,
        tick_ms: tickMs,
      });
      this.connect(created.session_id);
    } catch (err) {
      this.showGatewayError(err as GatewayError);
    }
  }

  connect(sessionId: string): void {
    this.abort?.abort();
    this.abort = new AbortController();
    this.update(attachSession(this.state, sessionId));
    void subscribeWithRetry(
      this.baseUrl,
      sessionId,
      {
        onDoc: (doc) => this.ingest(doc),
        onStatus: (status, message) =>
          this.update(setConnection(this.state, status, message ?? "")),
      },
      this.abort.signal,
    );
    void getSessionState(this.baseUrl, sessionId)
      .then((state) =>
        this.update(setRunControls(this.state, state.mode === "running", state.tick_ms)),
      )
      .catch((err: GatewayError) => this.showGatewayError(err));
  }

  private showGatewayError(err: GatewayError): void {
    this.update(setConnection(this.state, "error", err.message));
  }

  private async post(event: Record<string, unknown>, label: string): Promise<any> {
    if (this.state.sessionId === null) return null;
    this.update(noteLocalEvent(this.state, label));
    try {
      const ack = await postEvent(this.baseUrl, this.state.sessionId, event);
      this.update(confirmLastLocalEvent(this.state));
      return ack;
    } catch (err) {
      const gatewayError = err as GatewayError;
      if (gatewayError.status === 409) {
        this.update(
          clearPendingWithNotice(this.state, "decision rejected: nothing pending anymore"),
        );
      } else {
        this.update(setConnection(this.state, this.state.connection, gatewayError.message));
      }
      return null;
    }
  }

  submitMission(form: MissionForm): void {
    const validation = validateMissionForm(form);
    this.renderFormErrors(validation.errors);
    if (!validation.ok) return;
    void this.post(formToEvent(form), `${form.kind === "task" ? "task" : "status"}: ${form.subject}`);
  }

  decide(action: "accept" | "override", architecture?: string): void {
    if (!decisionEnabled(this.state)) return;
    const event: Record<string, unknown> = { type: "decision", action };
    if (action === "override") event.architecture = architecture;
    void this.post(event, `decision: ${action}${architecture ? " " + architecture : ""}`);
  }

  step(count: number): void {
    void this.post({ type: "step", count }, `step x${count}`);
  }

  pause(): void {
    void this.post({ type: "pause" }, "pause").then(
      () => this.update(setRunControls(this.state, false)),
    );
  }

  resume(tickMs: number): void {
    void this.post({ type: "resume", tick_ms: tickMs }, `resume @${tickMs}ms`).then(
      () => this.update(setRunControls(this.state, true, tickMs)),
    );
  }

  private renderFormErrors(errors: Record<string, string | undefined>): void {
    el<HTMLElement>("err-subject").textContent = errors.subject ?? "";
    el<HTMLElement>("err-comm").textContent = errors.commQuality ?? "";
    el<HTMLElement>("err-failure").textContent = errors.failureProbability ?? "";
  }

  render(): void {
    const s = this.state;
    const banner = el<HTMLElement>("connection-banner");
    banner.dataset.status = s.connection;
    banner.textContent =
      s.connection === "live"
        ? `live — session ${s.sessionId}`
        : `${s.connection}${s.connectionMessage ? ": " + s.connectionMessage : ""}`;
    el<HTMLButtonElement>("retry-connect").hidden = !(
      s.connection === "disconnected" || s.connection === "error"
    );

    el<HTMLElement>("iteration-counter").textContent = String(s.iteration);
    const badge = el<HTMLElement>("architecture-badge");
    badge.textContent = s.architecture ?? "—";
    badge.dataset.architecture = s.architecture ?? "none";
    el<HTMLElement>("connectivity-flag").textContent = s.connected ? "connected" : "disconnected";
    el<HTMLElement>("connectivity-flag").dataset.connected = String(s.connected);

    const card = el<HTMLElement>("decision-card");
    card.hidden = s.pending === null;
    if (s.pending !== null) {
      el<HTMLElement>("card-architecture").textContent = s.pending.architecture;
      el<HTMLElement>("card-rule").textContent = s.pending.matched_rule;
      el<HTMLElement>("card-source").textContent = s.pending.source;
      el<HTMLElement>("card-rationale").textContent = s.pending.rationale;
    }
    const enabled = decisionEnabled(s);
    el<HTMLButtonElement>("btn-accept").disabled = !enabled;
    el<HTMLButtonElement>("btn-override").disabled = !enabled;
    el<HTMLSelectElement>("override-pick").disabled = !enabled;

    el<HTMLButtonElement>("btn-pause").disabled = !s.running;
    el<HTMLButtonElement>("btn-resume").disabled = s.running;

    const logList = el<HTMLUListElement>("event-log");
    logList.replaceChildren(
      ...s.log
        .slice()
        .reverse()
        .map((entry) => {
          const item = document.createElement("li");
          item.dataset.kind = entry.kind;
          item.textContent = entry.confirmed ? entry.label : `${entry.label} …`;
          return item;
        }),
    );

    renderTelemetry(
      {
        size: el<HTMLCanvasElement>("chart-size"),
        energy: el<HTMLCanvasElement>("chart-energy"),
        connectivity: el<HTMLCanvasElement>("chart-connectivity"),
      },
      s.series,
    );
  }
}

function fillSelect(select: HTMLSelectElement, values: readonly string[]): void {
  select.replaceChildren(
    new Option("— select —", ""),
    ...values.map((v) => new Option(v.replaceAll("_", " "), v)),
  );
}

export function boot(): void {
  const params = new URLSearchParams(window.location.search);
  const baseInput = el<HTMLInputElement>("gateway-url");
  baseInput.value = params.get("gateway") ?? "http://127.0.0.1:8000";

  let console_ = new Console(baseInput.value);

  const subjectSelect = el<HTMLSelectElement>("mission-subject");
  const kindSelect = el<HTMLSelectElement>("mission-kind");
  const refreshSubjects = () =>
    fillSelect(subjectSelect, kindSelect.value === "task" ? SCENARIOS : STATUSES);
  fillSelect(el<HTMLSelectElement>("mission-comm"), COMM_QUALITIES);
  fillSelect(el<HTMLSelectElement>("mission-failure"), FAILURE_PROBABILITIES);
  refreshSubjects();
  kindSelect.addEventListener("change", refreshSubjects);

  el<HTMLButtonElement>("btn-create").addEventListener("click", () => {
    console_ = new Console(baseInput.value);
    void console_.createAndConnect(
      el<HTMLSelectElement>("session-policy").value,
      el<HTMLSelectElement>("session-mode").value,
      Number(el<HTMLInputElement>("tick-ms").value) || 500,
    );
  });
  el<HTMLButtonElement>("btn-attach").addEventListener("click", () => {
    const sid = el<HTMLInputElement>("session-id").value.trim();
    if (sid.length > 0) {
      console_ = new Console(baseInput.value);
      console_.connect(sid);
    }
  });
  el<HTMLButtonElement>("retry-connect").addEventListener("click", () => {
    if (console_.state.sessionId !== null) console_.connect(console_.state.sessionId);
  });

  el<HTMLButtonElement>("btn-submit-mission").addEventListener("click", () => {
    console_.submitMission({
      kind: kindSelect.value === "task" ? "task" : "status",
      subject: subjectSelect.value,
      commQuality: el<HTMLSelectElement>("mission-comm").value,
      failureProbability: el<HTMLSelectElement>("mission-failure").value,
    });
  });

  el<HTMLButtonElement>("btn-accept").addEventListener("click", () => console_.decide("accept"));
  el<HTMLButtonElement>("btn-override").addEventListener("click", () =>
    console_.decide("override", el<HTMLSelectElement>("override-pick").value),
  );
  el<HTMLButtonElement>("btn-step").addEventListener("click", () =>
    console_.step(Number(el<HTMLInputElement>("step-count").value) || 1),
  );
  el<HTMLButtonElement>("btn-pause").addEventListener("click", () => console_.pause());
  el<HTMLButtonElement>("btn-resume").addEventListener("click", () =>
    console_.resume(Number(el<HTMLInputElement>("tick-ms").value) || 500),
  );
}
