/** Thin HTTP client for the inference service.
 *
 * No client-side inference: every probability shown in the UI comes
 * from a service response.
 */

import type { PredictRequest, PredictResponse } from './types.js'

export type FetchLike = (url: string, init: RequestInit) => Promise<Response>

export interface ClientOptions {
  baseUrl?: string
  fetchImpl?: FetchLike
}

export class ServiceClient {
  private baseUrl: string
  private fetchImpl: FetchLike

  constructor(options: ClientOptions = {}) {
    this.baseUrl = (options.baseUrl ?? '').replace(/\/$/, '')
    this.fetchImpl = options.fetchImpl ?? ((url, init) => fetch(url, init))
  }

  async predict(request: PredictRequest): Promise<PredictResponse> {
    let response: Response
    try {
      response = await this.fetchImpl(this.baseUrl + request.path, {
        method: 'POST',
        headers: { 'content-type': 'application/json' },
        body: JSON.stringify(request.body),
      })
    } catch (err) {
      return { ok: false, result: null, error: `network error: ${String(err)}` }
    }
    try {
      const envelope = (await response.json()) as PredictResponse
      if (!envelope.ok && !envelope.error) {
        envelope.error = `service returned HTTP ${response.status}`
      }
      return envelope
    } catch {
      return {
        ok: false,
        result: null,
        error: `service returned HTTP ${response.status} with a non-JSON body`,
      }
    }
  }

  async health(): Promise<unknown> {
    const response = await this.fetchImpl(this.baseUrl + '/v1/health', { method: 'GET' })
    return response.json()
  }
}
