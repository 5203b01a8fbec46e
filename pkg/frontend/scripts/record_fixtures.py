"""Record request/response fixtures from a real in-process service.

Each request fixture is the exact JSON body the UI must produce for a
filled form; every one is validated against a live service built from
toy artifacts before being written. Run from the repository root:

    python3 frontend/scripts/record_fixtures.py
"""

import base64
import json
import struct
import sys
import tempfile
from pathlib import Path

import numpy as np

REPO = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(REPO / "tests"))

from fastapi.testclient import TestClient

from fixtures import build_toy_registry
from multidx.service import create_app, load_registry

FIXTURE_DIR = Path(__file__).resolve().parents[1] / "fixtures"

SYMPTOM_FIXTURE_FLAGS = {
    "Headache": 1,
    "Fever": 1,
    "Cough": 0,
    "Sore throat": 1,
    "Shortness of breath": 0,
}

BLOOD_FIXTURE_VALUES = {
    "blood5": {"Age": 47, "TWBC": 6.2, "Eosinophils": 0.9, "Monocytes": 0.55, "Platelets": 210},
    "blood25": None,  # filled below from the feature list
    "mortality7": {
        "Neutrophils": 4.1,
        "Lymphocytes": 1.3,
        "Monocytes": 0.5,
        "Platelets": 180,
        "Albumin": 3.4,
        "Hs-CRP": 12.5,
        "PT": 13.1,
    },
    "mortality9": {
        "Age": 63,
        "MCHC": 33.2,
        "RDW": 14.1,
        "TWBC": 7.8,
        "BE": -2.0,
        "PT": 12.9,
        "PTT": 31.0,
        "RR": 22,
        "SpO2": 91,
    },
}


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def ramp_wav_base64(n=512, sample_rate=8000) -> str:
    """PCM ramp with exactly representable sample values (no rounding)."""
    pcm = np.arange(-n // 2, n // 2, dtype="<i2")
    body = pcm.tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(body),
        b"WAVE",
        b"fmt ",
        16,
        1,
        1,
        sample_rate,
        sample_rate * 2,
        2,
        16,
        b"data",
        len(body),
    )
    return base64.b64encode(header + body).decode()


def tiny_png() -> bytes:
    from multidx.imaging import GrayImage, png_bytes

    pixels = np.ones((24, 24))
    cols = np.arange(24)
    rows = (12 + 8 * np.sin(cols / 3.0)).astype(int)
    for c in cols:
        pixels[rows[c], c] = 0.0
        if c:
            lo, hi = sorted((rows[c - 1], rows[c]))
            pixels[lo : hi + 1, c] = 0.0
    return png_bytes(GrayImage(pixels=pixels))


def main() -> None:
    from multidx.pipelines import BLOOD25_FEATURES

    BLOOD_FIXTURE_VALUES["blood25"] = {
        name: round(1.0 + 0.25 * i, 2) for i, name in enumerate(BLOOD25_FEATURES)
    }

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        model_dir = tmp / "models"
        data_dir = tmp / "data"
        data_dir.mkdir()
        build_toy_registry(model_dir, data_dir)
        client = TestClient(create_app(load_registry(model_dir)))

        png_b64 = base64.b64encode(tiny_png()).decode()
        requests = {
            "symptoms": {"inputs": SYMPTOM_FIXTURE_FLAGS},
            "blood5": {"inputs": BLOOD_FIXTURE_VALUES["blood5"]},
            "blood25": {"inputs": BLOOD_FIXTURE_VALUES["blood25"]},
            "mortality7": {"inputs": BLOOD_FIXTURE_VALUES["mortality7"]},
            "mortality9": {"inputs": BLOOD_FIXTURE_VALUES["mortality9"]},
            "cough": {"inputs": {"wav_base64": ramp_wav_base64()}},
            "raman": {"inputs": {"png_base64": png_b64}},
            "ecg": {"inputs": {"png_base64": png_b64}},
        }

        FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
        responses = {}
        for mode, body in requests.items():
            resp = client.post(f"/v1/predict/{mode}", json=body)
            assert resp.status_code == 200, f"{mode}: {resp.text}"
            envelope = resp.json()
            assert envelope["ok"] is True
            responses[mode] = envelope
            fixture = {"path": f"/v1/predict/{mode}", "body": body}
            out = FIXTURE_DIR / f"request_{mode}.json"
            out.write_text(canonical(fixture) + "\n", encoding="utf-8")
            print(f"recorded {out.name}")

        ok_env = responses["blood5"]
        ok_env["result"]["latency_ms"] = 1.25  # pin for the fixture
        (FIXTURE_DIR / "response_ok.json").write_text(
            canonical(ok_env) + "\n", encoding="utf-8"
        )
        (FIXTURE_DIR / "response_503.json").write_text(
            canonical(
                {"ok": False, "result": None, "error": "model for mode 'blood5' not loaded"}
            )
            + "\n",
            encoding="utf-8",
        )
        (FIXTURE_DIR / "png_sample.png").write_bytes(tiny_png())
        print("recorded response_ok.json, response_503.json, png_sample.png")


if __name__ == "__main__":
    main()
