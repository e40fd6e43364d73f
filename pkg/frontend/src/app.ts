/** Browser entry point: binds the controller to the static page.
 *
 * Set `window.TPGPT_API_BASE` before loading to point at a service on a
 * different origin; by default the client talks to the page's own origin.
 */

import { ApiClient } from "./api.js";
import { ChatController } from "./controller.js";
import {
  renderBanner,
  renderChatBubble,
  renderSchemaTree,
  renderSessionList,
  renderTraceView,
} from "./render.js";

declare global {
  interface Window {
    TPGPT_API_BASE?: string;
  }
}

function byId<T extends HTMLElement>(id: string): T {
  const element = document.getElementById(id);
  if (!element) throw new Error(`missing element #${id}`);
  return element as T;
}

function main(): void {
  const api = new ApiClient(window.TPGPT_API_BASE ?? "");
  const chatLog = byId<HTMLDivElement>("chat-log");
  const bannerHost = byId<HTMLDivElement>("banners");
  const input = byId<HTMLInputElement>("question-input");
  const sendButton = byId<HTMLButtonElement>("send-button");
  const newSessionButton = byId<HTMLButtonElement>("new-session");
  const sessionList = byId<HTMLUListElement>("session-list");
  const tracePanel = byId<HTMLDivElement>("trace-panel");
  const schemaPanel = byId<HTMLDivElement>("schema-panel");

  const controller = new ChatController(api, {
    onBusyChange(busy) {
      input.disabled = busy;
      sendButton.disabled = busy;
      sendButton.textContent = busy ? "thinking…" : "send";
    },
    onUserMessage(text) {
      chatLog.insertAdjacentHTML("beforeend", renderChatBubble("user", text));
      chatLog.scrollTop = chatLog.scrollHeight;
    },
    onAssistantMessage(reply) {
      chatLog.insertAdjacentHTML(
        "beforeend",
        renderChatBubble("assistant", reply.answer, reply.trace_id),
      );
      chatLog.scrollTop = chatLog.scrollHeight;
    },
    onBanner(kind, text) {
      bannerHost.innerHTML = renderBanner(kind, text);
      setTimeout(() => { bannerHost.innerHTML = ""; }, 6000);
    },
    onTraceLoaded(trace) {
      tracePanel.innerHTML = renderTraceView(trace);
      tracePanel.classList.add("open");
    },
    onSessionsChanged(sessionIds, active) {
      sessionList.innerHTML = renderSessionList(sessionIds, active);
      chatLog.innerHTML = "";
    },
  });

  newSessionButton.addEventListener("click", () => {
    controller.newSession().catch((error) => {
      bannerHost.innerHTML = renderBanner("error", String(error));
    });
  });

  sessionList.addEventListener("click", (event) => {
    const item = (event.target as HTMLElement).closest<HTMLElement>(
      ".session-item");
    if (item?.dataset.sessionId) controller.selectSession(item.dataset.sessionId);
  });

  const submit = () => {
    const question = input.value;
    input.value = "";
    void controller.send(question);
  };
  sendButton.addEventListener("click", submit);
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter" && !controller.inFlight) submit();
  });

  chatLog.addEventListener("click", (event) => {
    const link = (event.target as HTMLElement).closest<HTMLElement>(
      ".trace-link");
    if (link?.dataset.traceId) {
      event.preventDefault();
      void controller.openTrace(link.dataset.traceId);
    }
  });

  byId<HTMLButtonElement>("close-trace").addEventListener("click", () => {
    tracePanel.classList.remove("open");
  });

  api.getSchema()
    .then((schema) => { schemaPanel.innerHTML = renderSchemaTree(schema); })
    .catch(() => { schemaPanel.innerHTML = renderBanner(
      "warn", "schema unavailable"); });

  controller.newSession().catch((error) => {
    bannerHost.innerHTML = renderBanner(
      "error", `cannot reach the service: ${error}`);
  });
}

document.addEventListener("DOMContentLoaded", main);
