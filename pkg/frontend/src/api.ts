// Typed client for the annotation service's JSON API.

import { AnnotationItem, AnnotationRecord, ApiError, Phase } from "./contract.js";

export class ApiRequestError extends Error {
  constructor(public status: number, public body: ApiError) {
    super(`${body.code}: ${body.message}`);
  }
}

export type Progress = { done: number; total: number };

export async function fetchNextTask(
  annotator: string,
  phase?: Phase,
  base = ""
): Promise<AnnotationItem | null> {
  const params = new URLSearchParams({ annotator });
  if (phase) {
    params.set("phase", phase);
  }
  const response = await fetch(`${base}/api/tasks/next?${params}`);
  if (response.status === 204) {
    return null;
  }
  if (!response.ok) {
    throw new ApiRequestError(response.status, await response.json());
  }
  return (await response.json()) as AnnotationItem;
}

export async function submitRecord(
  record: AnnotationRecord,
  base = "",
  retries = 2
): Promise<number> {
  for (let attempt = 0; ; attempt++) {
    try {
      const response = await fetch(`${base}/api/annotations`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(record),
      });
      if (!response.ok) {
        throw new ApiRequestError(response.status, await response.json());
      }
      return ((await response.json()) as { revision: number }).revision;
    } catch (error) {
      // Retry only transient network failures, never rejections.
      if (error instanceof ApiRequestError || attempt >= retries) {
        throw error;
      }
    }
  }
}

export async function fetchProgress(annotator: string, base = ""): Promise<Progress> {
  const params = new URLSearchParams({ annotator });
  const response = await fetch(`${base}/api/progress?${params}`);
  if (!response.ok) {
    throw new ApiRequestError(response.status, await response.json());
  }
  return (await response.json()) as Progress;
}
