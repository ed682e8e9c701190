/** Runtime configuration from a single document next to the page. */

export interface UiConfig {
  apiBaseUrl: string;
  tileUrl: string;
  tileAttribution: string;
}

export const DEFAULT_CONFIG: UiConfig = {
  apiBaseUrl: "http://127.0.0.1:8000",
  tileUrl: "https://tile.openstreetmap.org/{z}/{x}/{y}.png",
  tileAttribution: "&copy; OpenStreetMap contributors",
};

export async function loadConfig(
  fetchFn: (url: string) => Promise<Response> = fetch,
): Promise<UiConfig> {
  try {
    const response = await fetchFn("./config.json");
    if (!response.ok) return DEFAULT_CONFIG;
    const doc = (await response.json()) as Partial<UiConfig>;
    return { ...DEFAULT_CONFIG, ...doc };
  } catch {
    return DEFAULT_CONFIG;
  }
}
