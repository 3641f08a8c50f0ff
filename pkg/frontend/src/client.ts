// Thin query client over the aggregate service. It only builds URLs, counts
// requests, and decodes JSON; interpretation happens in the view builders.

import {
  AttributeListDoc,
  BoxplotDoc,
  CooccurrenceDoc,
  DistributionDoc,
  ErrorBody,
  FilterSpec,
  NpmiDoc,
  PatchGridDoc,
  SummaryDoc,
} from "./types.js";

export interface FetchResponseLike {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}

export type FetchLike = (url: string) => Promise<FetchResponseLike>;

export class ServiceError extends Error {
  constructor(public status: number, message: string,
              public validAttributes?: string[]) {
    super(message);
  }
}

export interface DistributionQuery {
  attribute: string;
  facets?: string[];
  thresholds?: Record<string, number>;
  filters?: FilterSpec[];
}

export class ServiceClient {
  requestCount = 0;

  constructor(private baseUrl: string, private fetchFn: FetchLike) {}

  buildUrl(path: string, params: Record<string, string>): string {
    const search = new URLSearchParams();
    for (const key of Object.keys(params).sort()) {
      search.set(key, params[key]);
    }
    const query = search.toString();
    return this.baseUrl + path + (query ? `?${query}` : "");
  }

  private async get<T>(path: string, params: Record<string, string>): Promise<T> {
    this.requestCount += 1;
    const response = await this.fetchFn(this.buildUrl(path, params));
    const body = (await response.json()) as T | ErrorBody;
    if (!response.ok) {
      const err = body as ErrorBody;
      throw new ServiceError(response.status,
                             err.error?.message ?? `request failed (${response.status})`,
                             err.error?.valid_attributes);
    }
    return body as T;
  }

  attributes(): Promise<AttributeListDoc> {
    return this.get("/attributes", {});
  }

  distribution(query: DistributionQuery): Promise<DistributionDoc> {
    const params: Record<string, string> = { attribute: query.attribute };
    if (query.facets?.length) params.facets = query.facets.join(",");
    if (query.thresholds && Object.keys(query.thresholds).length) {
      params.thresholds = JSON.stringify(query.thresholds);
    }
    if (query.filters?.length) params.filters = JSON.stringify(query.filters);
    return this.get("/distribution", params);
  }

  boxplot(attribute: string, thresholds?: Record<string, number>): Promise<BoxplotDoc> {
    const params: Record<string, string> = { attribute };
    if (thresholds && Object.keys(thresholds).length) {
      params.thresholds = JSON.stringify(thresholds);
    }
    return this.get("/boxplot", params);
  }

  cooccurrence(x: string, y: string, normalization = "raw",
               thresholds?: Record<string, number>): Promise<CooccurrenceDoc> {
    const params: Record<string, string> = { x, y, normalization };
    if (thresholds && Object.keys(thresholds).length) {
      params.thresholds = JSON.stringify(thresholds);
    }
    return this.get("/cooccurrence", params);
  }

  npmi(x: string, y: string,
       thresholds?: Record<string, number>): Promise<NpmiDoc> {
    const params: Record<string, string> = { x, y };
    if (thresholds && Object.keys(thresholds).length) {
      params.thresholds = JSON.stringify(thresholds);
    }
    return this.get("/npmi", params);
  }

  summary(): Promise<SummaryDoc> {
    return this.get("/summary", {});
  }

  patches(bin: number, limit?: number): Promise<PatchGridDoc> {
    const params: Record<string, string> = { bin: String(bin) };
    if (limit !== undefined) params.limit = String(limit);
    return this.get("/patches", params);
  }
}
