"""HTTP explanation service.

Serves prediction, local explanation, counterfactual and global-effect
queries over one trained model artifact.  The artifact is loaded once at
startup and never mutated; explainer calls are pure functions of
(artifact, request, seed), so identical requests return identical
bodies.  The seed comes from the X-Seed header and defaults to a fixed
value.  No request body is logged.
"""

from __future__ import annotations

import json
import uuid
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from nephro_xai import attribution
from nephro_xai import counterfactual as cfx
from nephro_xai.pipeline import SCHEMA_VERSION, _fingerprint, _to_raw_units, load_predictor

DEFAULT_SEED = 1337
SEED_HEADER = "x-seed"
FINGERPRINT_HEADER = "x-schema-fingerprint"

#: clinician-facing display units for the served feature set
FEATURE_UNITS = {
    "hemo": "g/dL",
    "sc": "mg/dL",
    "al": "grade",
    "age": "years",
    "bgr": "mg/dL",
    "bu": "mg/dL",
    "bp": "mm Hg",
    "sod": "mEq/L",
    "pot": "mEq/L",
    "pcv": "%",
}


class RequestError(Exception):
    def __init__(self, status: int, message: str, field: str | None = None):
        super().__init__(message)
        self.status = status
        self.message = message
        self.field = field


class ModelContext:
    """Immutable service state built from the model artifact."""

    def __init__(self, model_doc: dict):
        expected = _fingerprint(model_doc["features"], model_doc["target"])
        if model_doc["fingerprint"] != expected:
            raise ValueError("model artifact fingerprint does not match its schema block")
        self.doc = model_doc
        self.predictor = load_predictor(model_doc)
        self.features = model_doc["features"]
        self.names = [f["name"] for f in self.features]
        self.kinds = [f["kind"] for f in self.features]
        self.nominal_mask = np.array([k == "nominal" for k in self.kinds])
        self.class_labels = model_doc["target"]["categories"]
        self.X = np.array(model_doc["training"]["X"], dtype=np.float64)
        self.immutables = tuple(model_doc.get("immutables", ()))
        self._global_cache: dict | None = None

    def encode_record(self, record: dict) -> np.ndarray:
        """Validate a raw-unit patient record and map it to model space.

        400 for missing/malformed fields, 422 for out-of-range values;
        validation never clamps.
        """
        if not isinstance(record, dict):
            raise RequestError(400, "record must be an object")
        x = np.empty(len(self.features))
        for j, f in enumerate(self.features):
            name = f["name"]
            if name not in record:
                raise RequestError(400, f"missing feature {name!r}", field=name)
            value = record[name]
            if f["kind"] == "nominal" and isinstance(value, str):
                if value not in f["categories"]:
                    raise RequestError(
                        422, f"unknown category {value!r} for {name!r}", field=name
                    )
                value = f["categories"].index(value)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise RequestError(400, f"non-numeric value for {name!r}", field=name)
            value = float(value)
            if f["kind"] == "nominal":
                if value != int(value) or not 0 <= value < len(f["categories"]):
                    raise RequestError(
                        422, f"{name!r} must be a category index 0..{len(f['categories']) - 1}",
                        field=name,
                    )
                x[j] = value
            else:
                if not f["min"] <= value <= f["max"]:
                    raise RequestError(
                        422,
                        f"{name!r} = {value:g} outside plausible range "
                        f"[{f['min']:g}, {f['max']:g}]",
                        field=name,
                    )
                x[j] = (value - f["mean"]) / f["std"]
        return x

    def global_effects(self, seed: int) -> dict:
        if self._global_cache is not None:
            return self._global_cache
        rng = np.random.default_rng(seed)
        rows = self.X[rng.choice(len(self.X), size=min(20, len(self.X)), replace=False)]
        background = self.X[:50]
        phis = [
            attribution.shapley_exact(self.predictor, r, background, feature_names=self.names).phi
            for r in rows
        ]
        ranking = np.abs(np.array(phis)).mean(axis=0)
        order = np.argsort(-ranking, kind="stable")
        grids = []
        for j, kind in enumerate(self.kinds):
            if kind != "numeric":
                continue
            grids.append(
                attribution.pdp(
                    self.predictor, [j], self.X,
                    feature_kinds=self.kinds, feature_names=self.names,
                ).to_document()
            )
        ales = []
        for j, kind in enumerate(self.kinds):
            if kind != "numeric":
                continue
            ales.append(
                attribution.ale(self.predictor, j, self.X, feature_names=self.names).to_document()
            )
        self._global_cache = {
            "schema_version": SCHEMA_VERSION,
            "ranking": [
                {"feature": self.names[int(i)], "mean_abs_phi": float(ranking[int(i)])}
                for i in order
            ],
            "pdp": grids,
            "ale": ales,
        }
        return self._global_cache


def _meta_document(ctx: ModelContext) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "family": ctx.doc["family"],
        "params": ctx.doc["params"],
        "fingerprint": ctx.doc["fingerprint"],
        "class_labels": ctx.class_labels,
        "cv_metrics": ctx.doc["cv_metrics"],
        "immutables": list(ctx.immutables),
        "features": [
            {
                "name": f["name"],
                "kind": f["kind"],
                "unit": FEATURE_UNITS.get(f["name"], ""),
                "categories": f["categories"],
                "min": f["min"],
                "max": f["max"],
                "immutable": f["name"] in ctx.immutables,
            }
            for f in ctx.features
        ],
    }


def create_app(model_path: str | Path, cors_origins: tuple[str, ...] = ()) -> FastAPI:
    model_doc = json.loads(Path(model_path).read_text())
    ctx = ModelContext(model_doc)
    app = FastAPI(title="nephro-xai explain service", docs_url=None, redoc_url=None)

    if cors_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    def _seed(request: Request) -> int:
        raw = request.headers.get(SEED_HEADER)
        if raw is None:
            return DEFAULT_SEED
        try:
            return int(raw)
        except ValueError:
            raise RequestError(400, f"bad {SEED_HEADER} header: {raw!r}")

    def _check_fingerprint(request: Request) -> None:
        claimed = request.headers.get(FINGERPRINT_HEADER)
        if claimed is not None and claimed != ctx.doc["fingerprint"]:
            raise RequestError(409, "schema fingerprint mismatch")

    async def _body(request: Request) -> dict:
        try:
            body = await request.json()
        except json.JSONDecodeError:
            raise RequestError(400, "malformed JSON body")
        if not isinstance(body, dict):
            raise RequestError(400, "body must be a JSON object")
        return body

    @app.exception_handler(RequestError)
    async def _request_error(_request, exc: RequestError):
        payload = {"schema_version": SCHEMA_VERSION, "error": exc.message}
        if exc.field is not None:
            payload["field"] = exc.field
        return JSONResponse(status_code=exc.status, content=payload)

    @app.exception_handler(Exception)
    async def _internal_error(_request, exc: Exception):
        return JSONResponse(
            status_code=500,
            content={
                "schema_version": SCHEMA_VERSION,
                "error": "internal error",
                "id": uuid.uuid4().hex,
            },
        )

    @app.get("/model/meta")
    async def model_meta(request: Request):
        _check_fingerprint(request)
        return _meta_document(ctx)

    @app.post("/predict")
    async def predict(request: Request):
        _check_fingerprint(request)
        body = await _body(request)
        x = ctx.encode_record(body.get("record", body))
        proba = ctx.predictor.predict_proba(x[None, :])[0]
        cls = int(np.argmax(proba))
        return {
            "schema_version": SCHEMA_VERSION,
            "class": ctx.class_labels[cls],
            "class_index": cls,
            "probabilities": {
                label: float(proba[i]) for i, label in enumerate(ctx.class_labels)
            },
        }

    @app.post("/explain")
    async def explain(request: Request):
        _check_fingerprint(request)
        seed = _seed(request)
        body = await _body(request)
        x = ctx.encode_record(body.get("record", body))
        background = ctx.X[:100]
        lime = attribution.lime_explain(
            ctx.predictor, x, background,
            seed=seed, feature_names=ctx.names, nominal_mask=ctx.nominal_mask,
        )
        if len(ctx.names) <= attribution.SHAPLEY_EXACT_MAX_FEATURES:
            shap = attribution.shapley_exact(
                ctx.predictor, x, background, feature_names=ctx.names
            )
        else:
            shap = attribution.shapley_sampled(
                ctx.predictor, x, background, seed=seed, feature_names=ctx.names
            )
        proba = ctx.predictor.predict_proba(x[None, :])[0]
        # efficiency invariant: attributions sum to the explained output
        drift = abs(float(shap.phi.sum()) + shap.base_value - float(proba[0]))
        if drift > 0.02:
            raise RuntimeError(f"shapley efficiency drift {drift:.4f}")
        return {
            "schema_version": SCHEMA_VERSION,
            "lime": lime.to_document(),
            "shapley": shap.to_document(),
            "probabilities": {
                label: float(proba[i]) for i, label in enumerate(ctx.class_labels)
            },
        }

    @app.post("/counterfactual")
    async def counterfactual(request: Request):
        _check_fingerprint(request)
        seed = _seed(request)
        body = await _body(request)
        x = ctx.encode_record(body.get("record", body))
        target = body.get("target_class")
        if isinstance(target, str):
            if target not in ctx.class_labels:
                raise RequestError(400, f"unknown target_class {target!r}")
            target = ctx.class_labels.index(target)
        if target is None:
            target = 1 - int(ctx.predictor.predict(x[None, :])[0])
        if target not in (0, 1):
            raise RequestError(400, "target_class must be 0, 1 or a class label")
        immutable_names = body.get("immutables", list(ctx.immutables))
        unknown = [n for n in immutable_names if n not in ctx.names]
        if unknown:
            raise RequestError(400, f"unknown immutable features {unknown}")
        immutable_idx = {ctx.names.index(n) for n in immutable_names}
        k = body.get("k", cfx.DEFAULT_K)
        if not isinstance(k, int) or not 1 <= k <= 20:
            raise RequestError(400, "k must be an integer in 1..20")
        categories = {
            j: len(f["categories"])
            for j, f in enumerate(ctx.features)
            if f["kind"] == "nominal"
        }
        try:
            result = cfx.counterfactual_search(
                ctx.predictor, x, int(target), ctx.X,
                k=k, immutables=immutable_idx, seed=seed,
                nominal_mask=ctx.nominal_mask, categories=categories,
                feature_names=ctx.names,
            )
        except cfx.CounterfactualError as exc:
            raise RequestError(422, str(exc))
        return {
            "schema_version": SCHEMA_VERSION,
            "result": result.to_document(),
            "original_units": _to_raw_units(x, ctx.doc),
            "counterfactual_units": [
                {
                    "record": _to_raw_units(c.row, ctx.doc),
                    "predicted_class": ctx.class_labels[c.predicted_class],
                    "probability": c.probability,
                    "distance": c.distance,
                    "changed": [ctx.names[j] for j in np.flatnonzero(c.changed)],
                }
                for c in result.counterfactuals
            ],
        }

    @app.get("/global")
    async def global_panel(request: Request):
        _check_fingerprint(request)
        return ctx.global_effects(DEFAULT_SEED)

    return app
