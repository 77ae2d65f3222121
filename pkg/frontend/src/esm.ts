/**
 * Experience-sampling questionnaire shown thirty seconds after the first
 * size adaptation. Two item wordings are light paraphrases (marked below);
 * the rest are the canonical forms.
 */

export type EsmChoice = { value: string; label: string };

export interface EsmItem {
  key: string;
  prompt: string;
  kind: "choice" | "scale";
  choices?: EsmChoice[];
  scaleMin?: string;
  scaleMax?: string;
}

export const ESM_ITEMS: EsmItem[] = [
  {
    key: "noticed",
    prompt: "Did you notice the user interface adjusting size just now?",
    kind: "choice",
    choices: [
      { value: "yes", label: "Yes" },
      { value: "unsure", label: "Unsure" },
      { value: "no", label: "No" },
    ],
  },
  {
    key: "expected",
    prompt: "The user interface resized the way I expected.",
    kind: "scale",
    scaleMin: "Strongly disagree",
    scaleMax: "Strongly agree",
  },
  {
    key: "influence",
    prompt: "How much influence did you feel you had over the changes in the user interface?",
    kind: "scale",
    scaleMin: "Not at all",
    scaleMax: "Completely",
  },
  {
    key: "helpful",
    prompt: "I found this user interface change helpful.",
    kind: "scale",
    scaleMin: "Strongly disagree",
    scaleMax: "Strongly agree",
  },
  {
    // paraphrase: satisfaction wording condensed for the modal
    key: "satisfied",
    prompt: "I am satisfied with how the user interface adapted.",
    kind: "scale",
    scaleMin: "Strongly disagree",
    scaleMax: "Strongly agree",
  },
  {
    key: "manual",
    prompt: "Would you rather adjust the user interface size manually?",
    kind: "choice",
    choices: [
      { value: "yes", label: "Yes" },
      { value: "unsure", label: "Unsure" },
      { value: "no", label: "No" },
    ],
  },
  {
    // paraphrase: response anchors shortened for the radio labels
    key: "frequency",
    prompt: "How do you feel about the frequency at which the user interface changed size?",
    kind: "choice",
    choices: [
      { value: "just_right", label: "Just right" },
      { value: "not_responsive_enough", label: "Not responsive enough" },
      { value: "too_sensitive", label: "Too sensitive" },
    ],
  },
];

export type EsmAnswers = Record<string, string | number | boolean>;

export function defaultAnswers(): EsmAnswers {
  const answers: EsmAnswers = {};
  for (const item of ESM_ITEMS) {
    answers[item.key] = item.kind === "scale" ? 3 : item.choices![0].value;
  }
  return answers;
}

/** Dismissing the modal without answering is logged as an explicit skip. */
export function skippedAnswers(): EsmAnswers {
  return { skipped: true };
}

export function validateAnswers(answers: EsmAnswers): string[] {
  const problems: string[] = [];
  for (const item of ESM_ITEMS) {
    const value = answers[item.key];
    if (value === undefined) {
      problems.push(`${item.key}: missing`);
      continue;
    }
    if (item.kind === "scale") {
      if (typeof value !== "number" || value < 1 || value > 5) {
        problems.push(`${item.key}: expected a 1-5 rating`);
      }
    } else if (!item.choices!.some((c) => c.value === value)) {
      problems.push(`${item.key}: not one of the offered responses`);
    }
  }
  return problems;
}
