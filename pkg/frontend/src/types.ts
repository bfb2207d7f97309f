import { z } from "zod";

/** Cap ids run 1..11; board slots 0 and 12 hold fixed anchor colors. */
export const CAPS_PER_ROW = 11;
export const ROWS = 4;

const capId = z.number().int().min(1).max(CAPS_PER_ROW);

const isPermutation = (row: readonly number[]): boolean => {
  if (row.length !== CAPS_PER_ROW) return false;
  const seen = new Set(row);
  if (seen.size !== CAPS_PER_ROW) return false;
  for (let id = 1; id <= CAPS_PER_ROW; id += 1) {
    if (!seen.has(id)) return false;
  }
  return true;
};

/** Row-wise cap order as exchanged with the service. */
export const ArrangementSchema = z
  .object({
    rows: z.array(z.array(capId).length(CAPS_PER_ROW)).length(ROWS),
  })
  .refine((doc) => doc.rows.every(isPermutation), {
    message: "each row must contain cap ids 1..11 exactly once",
  });

export const SlotSchema = z.object({
  slot: z.number().int().min(0).max(12),
  fixed: z.boolean(),
  hex: z.string().regex(/^#[0-9A-F]{6}$/),
  cap_id: capId.optional(),
});

export const PaletteSchema = z.object({
  rows: z
    .array(
      z.object({
        row: z.number().int().min(1).max(ROWS),
        slots: z.array(SlotSchema).length(13),
      }),
    )
    .length(ROWS),
});

export const ProfileSchema = z.object({
  type: z.enum(["none", "protan", "deutan", "tritan"]),
  severity: z.number().min(0).max(1),
});

export const ReportSchema = z.object({
  cap_errors: z.array(z.array(z.number().int().min(0)).length(CAPS_PER_ROW)).length(ROWS),
  row_errors: z.array(z.number().int().min(0)).length(ROWS),
  total: z.number().int().min(0),
  scaled: z.number().min(0),
  protan_error: z.number().int().min(0),
  deutan_error: z.number().int().min(0),
  tritan_error: z.number().int().min(0),
});

export const SessionSchema = z.object({
  version: z.string(),
  session_id: z.string().min(1),
  seed: z.number().int(),
  palette: PaletteSchema,
  shuffled: ArrangementSchema,
  arrangement: ArrangementSchema.nullable(),
  report: ReportSchema.nullable(),
  profile: ProfileSchema.nullable(),
});

export const SubmitResponseSchema = z.object({
  version: z.string(),
  session_id: z.string().min(1),
  report: ReportSchema,
  profile: ProfileSchema,
});

export type ArrangementDoc = z.infer<typeof ArrangementSchema>;
export type PaletteDoc = z.infer<typeof PaletteSchema>;
export type ProfileDoc = z.infer<typeof ProfileSchema>;
export type ReportDoc = z.infer<typeof ReportSchema>;
export type SessionDoc = z.infer<typeof SessionSchema>;
export type SubmitResponseDoc = z.infer<typeof SubmitResponseSchema>;

export const PROFILE_LABELS: Record<ProfileDoc["type"], string> = {
  none: "None",
  protan: "Protan",
  deutan: "Deutan",
  tritan: "Tritan",
};

export function describeProfile(profile: ProfileDoc): string {
  if (profile.type === "none") return "No deficiency detected";
  const pct = Math.round(profile.severity * 100);
  return `${PROFILE_LABELS[profile.type]}, ${pct}% severity`;
}
