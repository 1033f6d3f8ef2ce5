/**
 * Interactive console: one input box, one verdict panel, bounded history,
 * language switcher (en/ar/fr with RTL support) and clipboard integration.
 *
 * At most one classification request is in flight; submissions made while a
 * request is pending queue behind it. A verdict is only ever rendered from a
 * service response.
 */

import {
  PredictionResult,
  SentinelClient,
  ServiceUnreachableError,
  ValidationError,
} from "./api.js";
import { CheckHistory } from "./history.js";
import {
  Language,
  LOCALES,
  LocaleTable,
  MessageKey,
  SUPPORTED_LANGUAGES,
  assertLocaleParity,
  isLanguage,
} from "./i18n.js";

const LANG_STORAGE_KEY = "urlsentinel.lang";

type PanelState =
  | { kind: "idle" }
  | { kind: "checking" }
  | { kind: "verdict"; result: PredictionResult }
  | { kind: "validation"; message: MessageKey }
  | { kind: "serviceDown"; lastUrl: string }
  | { kind: "clipboardDenied" };

export class ConsoleApp {
  readonly history = new CheckHistory();
  private locale: LocaleTable;
  private state: PanelState = { kind: "idle" };
  private queue: Promise<void> = Promise.resolve();
  private inFlight = false;

  private input!: HTMLInputElement;
  private checkBtn!: HTMLButtonElement;
  private pasteBtn!: HTMLButtonElement;
  private langSelect!: HTMLSelectElement;
  private panel!: HTMLElement;
  private historyList!: HTMLElement;
  private titleEl!: HTMLElement;
  private taglineEl!: HTMLElement;
  private historyTitleEl!: HTMLElement;
  private langLabelEl!: HTMLLabelElement;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: SentinelClient,
    private readonly storage: Storage = window.localStorage,
  ) {
    assertLocaleParity();
    const saved = this.storage.getItem(LANG_STORAGE_KEY);
    this.locale = LOCALES[isLanguage(saved) ? saved : "en"];
    this.buildDom();
    this.applyLocale();
  }

  get language(): Language {
    return this.locale.language;
  }

  private t(key: MessageKey): string {
    return this.locale.strings[key];
  }

  private buildDom(): void {
    this.root.innerHTML = "";

    const header = document.createElement("header");
    this.titleEl = document.createElement("h1");
    this.titleEl.id = "app-title";
    this.taglineEl = document.createElement("p");
    this.taglineEl.id = "app-tagline";

    const langWrap = document.createElement("div");
    langWrap.className = "lang-switch";
    this.langLabelEl = document.createElement("label");
    this.langLabelEl.id = "lang-label";
    this.langLabelEl.htmlFor = "lang-select";
    this.langSelect = document.createElement("select");
    this.langSelect.id = "lang-select";
    for (const lang of SUPPORTED_LANGUAGES) {
      const opt = document.createElement("option");
      opt.value = lang;
      opt.textContent = lang;
      this.langSelect.appendChild(opt);
    }
    this.langSelect.value = this.locale.language;
    this.langSelect.addEventListener("change", () => {
      this.switchLanguage(this.langSelect.value as Language);
    });
    langWrap.append(this.langLabelEl, this.langSelect);
    header.append(this.titleEl, this.taglineEl, langWrap);

    const form = document.createElement("form");
    form.id = "check-form";
    this.input = document.createElement("input");
    this.input.id = "url-input";
    this.input.type = "text";
    this.input.autocomplete = "off";
    this.checkBtn = document.createElement("button");
    this.checkBtn.id = "check-btn";
    this.checkBtn.type = "submit";
    this.pasteBtn = document.createElement("button");
    this.pasteBtn.id = "paste-btn";
    this.pasteBtn.type = "button";
    form.append(this.input, this.checkBtn, this.pasteBtn);
    form.addEventListener("submit", (ev) => {
      ev.preventDefault();
      void this.submit(this.input.value);
    });
    this.pasteBtn.addEventListener("click", () => {
      void this.pasteFromClipboard();
    });

    this.panel = document.createElement("section");
    this.panel.id = "verdict-panel";

    const historySection = document.createElement("section");
    this.historyTitleEl = document.createElement("h2");
    this.historyTitleEl.id = "history-title";
    this.historyList = document.createElement("ul");
    this.historyList.id = "history-list";
    historySection.append(this.historyTitleEl, this.historyList);

    this.root.append(header, form, this.panel, historySection);
  }

  /** Queue a classification; resolves when this submission has rendered. */
  submit(text: string): Promise<void> {
    const job = this.queue.then(() => this.doSubmit(text));
    this.queue = job.catch(() => undefined);
    return job;
  }

  private async doSubmit(text: string): Promise<void> {
    const trimmed = text.trim();
    if (!trimmed) {
      this.state = { kind: "validation", message: "errorEmptyInput" };
      this.render();
      return;
    }
    this.inFlight = true;
    this.state = { kind: "checking" };
    this.render();
    try {
      const result = await this.client.classify(trimmed);
      this.history.add({
        url: result.url,
        label: result.label,
        score: result.score,
        timestamp: Date.now(),
        latencyMs: result.latency_us / 1000,
      });
      this.state = { kind: "verdict", result };
    } catch (err) {
      if (err instanceof ValidationError) {
        this.state = { kind: "validation", message: "errorInvalidUrl" };
      } else if (err instanceof ServiceUnreachableError) {
        this.state = { kind: "serviceDown", lastUrl: trimmed };
      } else {
        throw err;
      }
    } finally {
      this.inFlight = false;
    }
    this.render();
  }

  async pasteFromClipboard(): Promise<void> {
    let text: string;
    try {
      text = await navigator.clipboard.readText();
    } catch {
      this.state = { kind: "clipboardDenied" };
      this.render();
      return;
    }
    this.input.value = text;
    if (text.startsWith("http://") || text.startsWith("https://")) {
      await this.submit(text);
    }
  }

  switchLanguage(lang: Language): void {
    this.locale = LOCALES[lang];
    this.storage.setItem(LANG_STORAGE_KEY, lang);
    this.applyLocale();
  }

  get busy(): boolean {
    return this.inFlight;
  }

  private applyLocale(): void {
    document.documentElement.dir = this.locale.direction;
    document.documentElement.lang = this.locale.language;
    this.titleEl.textContent = this.t("appTitle");
    this.taglineEl.textContent = this.t("tagline");
    this.input.placeholder = this.t("urlPlaceholder");
    this.checkBtn.textContent = this.t("checkButton");
    this.pasteBtn.textContent = this.t("pasteButton");
    this.langLabelEl.textContent = this.t("languageLabel");
    this.historyTitleEl.textContent = this.t("historyTitle");
    this.langSelect.value = this.locale.language;
    this.render();
  }

  private render(): void {
    this.panel.innerHTML = "";
    this.panel.className = "";
    switch (this.state.kind) {
      case "idle":
        break;
      case "checking": {
        const p = document.createElement("p");
        p.id = "checking-note";
        p.textContent = this.t("checking");
        this.panel.appendChild(p);
        break;
      }
      case "verdict": {
        const { result } = this.state;
        const box = document.createElement("div");
        box.id = "verdict";
        box.className =
          result.label === "malicious" ? "verdict-malicious" : "verdict-benign";
        const label = document.createElement("strong");
        label.id = "verdict-label";
        label.textContent =
          result.label === "malicious"
            ? this.t("verdictMalicious")
            : this.t("verdictBenign");
        const score = document.createElement("span");
        score.id = "verdict-score";
        score.textContent = `${this.t("scoreLabel")}: ${(result.score * 100).toFixed(1)}%`;
        const latency = document.createElement("span");
        latency.id = "verdict-latency";
        latency.textContent = `${this.t("latencyLabel")}: ${(result.latency_us / 1000).toFixed(1)} ms`;
        const url = document.createElement("code");
        url.id = "verdict-url";
        url.textContent = result.url;
        box.append(label, score, latency, url);
        this.panel.appendChild(box);
        break;
      }
      case "validation":
      case "clipboardDenied": {
        const note = document.createElement("p");
        note.id = "validation-note";
        note.className = "note";
        note.textContent = this.t(
          this.state.kind === "clipboardDenied"
            ? "clipboardDenied"
            : this.state.message,
        );
        this.panel.appendChild(note);
        break;
      }
      case "serviceDown": {
        const banner = document.createElement("div");
        banner.id = "error-banner";
        banner.className = "banner-error";
        const msg = document.createElement("span");
        msg.textContent = this.t("errorServiceDown");
        const retry = document.createElement("button");
        retry.id = "retry-btn";
        retry.type = "button";
        retry.textContent = this.t("retryButton");
        const lastUrl = this.state.lastUrl;
        retry.addEventListener("click", () => {
          void this.submit(lastUrl);
        });
        banner.append(msg, retry);
        this.panel.appendChild(banner);
        break;
      }
    }
    this.renderHistory();
  }

  private renderHistory(): void {
    this.historyList.innerHTML = "";
    if (this.history.size === 0) {
      const li = document.createElement("li");
      li.className = "history-empty";
      li.textContent = this.t("historyEmpty");
      this.historyList.appendChild(li);
      return;
    }
    for (const entry of this.history.list()) {
      const li = document.createElement("li");
      li.className = `history-${entry.label}`;
      const verdict =
        entry.label === "malicious"
          ? this.t("verdictMalicious")
          : this.t("verdictBenign");
      li.textContent = `${verdict} · ${(entry.score * 100).toFixed(1)}% · ${entry.url}`;
      this.historyList.appendChild(li);
    }
  }
}
