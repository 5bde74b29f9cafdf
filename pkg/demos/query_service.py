"""The HTTP contract, exercised in process.

Builds the FastAPI app over the trained artifact (training first if
needed) and walks a clinician-style session with an in-process test
client: metadata, a prediction, an explanation, a what-if probe, and a
counterfactual request.
"""

from pathlib import Path

from fastapi.testclient import TestClient

from nephro_xai import pipeline
from nephro_xai.service import create_app

OUT = Path(__file__).parent / "demo_out"

PATIENT = {"hemo": 9.1, "sc": 3.2, "al": 3, "htn": "yes", "dm": "yes", "age": 61}


def main() -> None:
    config = pipeline.load_config(out=str(OUT), seed=0)
    if not (OUT / pipeline.MODEL_ARTIFACT).is_file():
        print("no trained model yet; running impute + train ...")
        pipeline.run_impute(config)
        pipeline.run_train(config)

    app = create_app(OUT / pipeline.MODEL_ARTIFACT)
    with TestClient(app) as client:
        meta = client.get("/model/meta").json()
        print(f"served model: {meta['family']} "
              f"(cv accuracy {meta['cv_metrics']['accuracy']:.3f})")
        print("intake fields:")
        for f in meta["features"]:
            bounds = (
                "/".join(f["categories"])
                if f["kind"] == "nominal"
                else f"{f['min']:.1f}..{f['max']:.1f} {f['unit']}"
            )
            lock = " [immutable]" if f["immutable"] else ""
            print(f"  {f['name']:6s} {bounds}{lock}")

        pred = client.post("/predict", json={"record": PATIENT}).json()
        print(f"\npatient {PATIENT}")
        print(f"prediction: {pred['class']} {pred['probabilities']}")

        explained = client.post(
            "/explain", json={"record": PATIENT}, headers={"X-Seed": "7"}
        ).json()
        print("\ntop attributions:")
        pairs = sorted(
            zip(explained["shapley"]["feature_names"], explained["shapley"]["phi"]),
            key=lambda t: -abs(t[1]),
        )
        for name, phi in pairs[:3]:
            print(f"  {name:6s} {phi:+.4f}")

        what_if = dict(PATIENT, hemo=14.0)
        probe = client.post("/predict", json={"record": what_if}).json()
        print(f"\nwhat-if hemo -> 14.0: {probe['class']} {probe['probabilities']}")

        cf = client.post(
            "/counterfactual", json={"record": PATIENT, "k": 3}
        ).json()
        print("\ncounterfactuals:")
        for entry in cf["counterfactual_units"]:
            changed = {k: entry["record"][k] for k in entry["changed"]}
            print(f"  -> {entry['predicted_class']}: {changed}")


if __name__ == "__main__":
    main()
