// Pitch-to-pixel mapping, matching the renderer: pitch x runs bottom
// to top over image rows (attack points up), pitch y left to right
// over columns, rounding half-up.

export const PITCH_LENGTH = 120;
export const PITCH_WIDTH = 80;

const roundHalfUp = (value: number): number => Math.floor(value + 0.5);

export const toPixel = (
  x: number, y: number, width: number, height: number,
): { row: number; col: number } => ({
  row: height - 1 - roundHalfUp((x / PITCH_LENGTH) * (height - 1)),
  col: roundHalfUp((y / PITCH_WIDTH) * (width - 1)),
});

export const fromPixel = (
  row: number, col: number, width: number, height: number,
): { x: number; y: number } => ({
  x: ((height - 1 - row) / (height - 1)) * PITCH_LENGTH,
  y: (col / (width - 1)) * PITCH_WIDTH,
});

export const clampToPitch = (x: number, y: number): { x: number; y: number } => ({
  x: Math.min(Math.max(x, 0), PITCH_LENGTH),
  y: Math.min(Math.max(y, 0), PITCH_WIDTH),
});
