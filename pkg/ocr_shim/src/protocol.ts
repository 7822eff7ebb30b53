/**
 * Wire protocol types and validation (see docs/protocol.md in the harness).
 *
 * Requests and responses are single JSON objects, newline-delimited on the
 * standard streams. A response echoes the request id and carries exactly
 * one of result / error.
 */

export const TASKS = ["ocr", "translate", "mm_translate"] as const;
export type Task = (typeof TASKS)[number];

export interface BackendRequest {
    id: string;
    task: Task;
    payload: Record<string, unknown>;
}

export interface BackendError {
    code: string;
    message: string;
}

export interface BackendResponse {
    id: string;
    ok: boolean;
    result?: Record<string, unknown>;
    error?: BackendError;
}

export function okResponse(id: string, result: Record<string, unknown>): BackendResponse {
    return { id, ok: true, result };
}

export function errorResponse(id: string, code: string, message: string): BackendResponse {
    return { id, ok: false, error: { code, message } };
}

/** Throws with a human-readable message when the request violates the schema. */
export function validateRequest(value: unknown): BackendRequest {
    if (typeof value !== "object" || value === null || Array.isArray(value)) {
        throw new Error("request must be a JSON object");
    }
    const obj = value as Record<string, unknown>;
    if (typeof obj.id !== "string") {
        throw new Error("request id must be a string");
    }
    if (!TASKS.includes(obj.task as Task)) {
        throw new Error(`unknown task ${JSON.stringify(obj.task)}`);
    }
    if (typeof obj.payload !== "object" || obj.payload === null || Array.isArray(obj.payload)) {
        throw new Error("request payload must be an object");
    }
    return obj as unknown as BackendRequest;
}
