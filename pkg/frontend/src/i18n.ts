/**
 * Locale tables for the console: English, Arabic and French.
 * All three tables carry the identical key set (checked at startup and in
 * tests); Arabic renders right-to-left.
 */

export type Language = "en" | "ar" | "fr";
export type Direction = "ltr" | "rtl";

export type MessageKey =
  | "appTitle"
  | "tagline"
  | "urlPlaceholder"
  | "checkButton"
  | "pasteButton"
  | "languageLabel"
  | "checking"
  | "verdictBenign"
  | "verdictMalicious"
  | "scoreLabel"
  | "latencyLabel"
  | "historyTitle"
  | "historyEmpty"
  | "errorServiceDown"
  | "retryButton"
  | "errorEmptyInput"
  | "errorInvalidUrl"
  | "clipboardDenied";

export interface LocaleTable {
  language: Language;
  direction: Direction;
  strings: Record<MessageKey, string>;
}

const en: LocaleTable = {
  language: "en",
  direction: "ltr",
  strings: {
    appTitle: "URL Sentinel",
    tagline: "Real-time malicious URL detection",
    urlPlaceholder: "Type or paste a URL to check",
    checkButton: "Check URL",
    pasteButton: "Paste from clipboard",
    languageLabel: "Language",
    checking: "Checking…",
    verdictBenign: "Benign",
    verdictMalicious: "Malicious",
    scoreLabel: "Threat score",
    latencyLabel: "Latency",
    historyTitle: "Recent checks",
    historyEmpty: "No URLs checked yet",
    errorServiceDown: "Detection service unreachable. Check that the server is running.",
    retryButton: "Retry",
    errorEmptyInput: "Please enter a URL first",
    errorInvalidUrl: "The service rejected this URL",
    clipboardDenied: "Clipboard access denied — paste manually (Ctrl+V)",
  },
};

const fr: LocaleTable = {
  language: "fr",
  direction: "ltr",
  strings: {
    appTitle: "URL Sentinel",
    tagline: "Détection en temps réel des URL malveillantes",
    urlPlaceholder: "Saisissez ou collez une URL à vérifier",
    checkButton: "Vérifier l'URL",
    pasteButton: "Coller depuis le presse-papiers",
    languageLabel: "Langue",
    checking: "Vérification…",
    verdictBenign: "Inoffensive",
    verdictMalicious: "Malveillante",
    scoreLabel: "Score de menace",
    latencyLabel: "Latence",
    historyTitle: "Vérifications récentes",
    historyEmpty: "Aucune URL vérifiée pour l'instant",
    errorServiceDown: "Service de détection injoignable. Vérifiez que le serveur est démarré.",
    retryButton: "Réessayer",
    errorEmptyInput: "Veuillez d'abord saisir une URL",
    errorInvalidUrl: "Le service a rejeté cette URL",
    clipboardDenied: "Accès au presse-papiers refusé — collez manuellement (Ctrl+V)",
  },
};

const ar: LocaleTable = {
  language: "ar",
  direction: "rtl",
  strings: {
    appTitle: "حارس الروابط",
    tagline: "كشف الروابط الخبيثة في الوقت الفعلي",
    urlPlaceholder: "اكتب أو الصق رابطًا للفحص",
    checkButton: "فحص الرابط",
    pasteButton: "لصق من الحافظة",
    languageLabel: "اللغة",
    checking: "جارٍ الفحص…",
    verdictBenign: "آمن",
    verdictMalicious: "خبيث",
    scoreLabel: "درجة الخطورة",
    latencyLabel: "زمن الاستجابة",
    historyTitle: "الفحوصات الأخيرة",
    historyEmpty: "لم يتم فحص أي رابط بعد",
    errorServiceDown: "تعذر الوصول إلى خدمة الكشف. تأكد من تشغيل الخادم.",
    retryButton: "إعادة المحاولة",
    errorEmptyInput: "الرجاء إدخال رابط أولًا",
    errorInvalidUrl: "رفضت الخدمة هذا الرابط",
    clipboardDenied: "تم رفض الوصول إلى الحافظة — الصق يدويًا (Ctrl+V)",
  },
};

export const LOCALES: Record<Language, LocaleTable> = { en, ar, fr };

export const SUPPORTED_LANGUAGES: Language[] = ["en", "ar", "fr"];

export function isLanguage(value: string | null): value is Language {
  return value === "en" || value === "ar" || value === "fr";
}

/** Throws if any locale table is missing a key another table defines. */
export function assertLocaleParity(): void {
  const reference = Object.keys(en.strings).sort();
  for (const table of Object.values(LOCALES)) {
    const keys = Object.keys(table.strings).sort();
    if (keys.length !== reference.length || keys.some((k, i) => k !== reference[i])) {
      throw new Error(`locale ${table.language} does not match the en key set`);
    }
  }
}
