"""FastAPI service wrapping the simulation/reconstruction core.

Package errors map to structured payloads: validation problems return 422,
file-level problems return 400, both carrying {kind, code, message} so thin
clients can translate them into exit codes.
"""

import math
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from PIL import Image

from .. import __version__, imageio
from ..errors import DataIOError, ValidationError
from ..metrics import evaluate
from ..motion import forward_corrupt
from ..phantom import shepp_logan, simulate_coils
from ..pipeline import ExperimentConfig, load_manifest, run_dataset, run_metrics, run_reconstruct, sample_motion
from ..sense import ReconConfig
from ..trajectory import make_trajectory
from . import schemas


def create_app() -> FastAPI:
    app = FastAPI(title="mrishot", version=__version__)

    @app.exception_handler(ValidationError)
    async def on_validation_error(request: Request, exc: ValidationError):
        return JSONResponse(
            status_code=422,
            content={"kind": "validation", "code": exc.code, "message": exc.message},
        )

    @app.exception_handler(DataIOError)
    async def on_io_error(request: Request, exc: DataIOError):
        return JSONResponse(
            status_code=400,
            content={"kind": "io", "code": exc.code, "message": exc.message},
        )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/phantom", response_model=schemas.PhantomResponse)
    def make_phantom(req: schemas.PhantomRequest):
        img = shepp_logan(req.n)
        if req.png:
            arr = (np.abs(img) * 255).round().astype(np.uint8)
            Path(req.out_path).parent.mkdir(parents=True, exist_ok=True)
            Image.fromarray(arr, mode="L").save(req.out_path)
        else:
            imageio.save_image(req.out_path, img)
        return {"path": req.out_path, "n": req.n}

    @app.post("/coils", response_model=schemas.CoilsResponse)
    def make_coils(req: schemas.CoilsRequest):
        coils = simulate_coils(req.n, req.n_coils)
        imageio.save_coils(req.out_path, coils.maps)
        return {"path": req.out_path, "n_coils": req.n_coils}

    @app.post("/simulate", response_model=schemas.SimulateResponse)
    def simulate(req: schemas.SimulateRequest):
        if req.clean_path is not None:
            clean = imageio.load_image(req.clean_path)
            n = clean.shape[0]
        else:
            n = req.n
            clean = shepp_logan(n)
        cfg = ExperimentConfig(
            n=n,
            shots=req.shots,
            trajectory=req.trajectory,
            max_rotation_deg=req.max_rotation_deg,
            max_translation_px=req.max_translation_px,
            n_coils=req.n_coils,
            seed=req.seed,
        )
        coils = simulate_coils(n, cfg.n_coils)
        traj = make_trajectory(cfg.trajectory, n, cfg.shots, seed=cfg.seed)
        schedule = sample_motion(cfg, np.random.default_rng(cfg.seed))
        data = forward_corrupt(clean, coils, traj, schedule)

        out = Path(req.out_dir)
        kspace_path = out / "kspace.mrif"
        coils_path = out / "coils.mrif"
        clean_path = out / "clean.mrif"
        imageio.save_kspace_bundle(kspace_path, data.grids, data.sampling_mask)
        imageio.save_coils(coils_path, coils.maps)
        imageio.save_image(clean_path, clean)
        return {
            "kspace_path": str(kspace_path),
            "coils_path": str(coils_path),
            "clean_path": str(clean_path),
            "schedule": schedule.to_rows(),
            "sampled_positions": data.n_k,
        }

    @app.post("/reconstruct", response_model=schemas.ReconstructResponse)
    def reconstruct(req: schemas.ReconstructRequest):
        cfg = ReconConfig(max_iters=req.max_iters, tol=req.tol, precondition=req.precondition)
        report = run_reconstruct(req.kspace_path, req.coils_path, cfg, req.out_path)
        return {
            "path": req.out_path,
            "iterations": report.iterations,
            "converged": report.converged,
            "residuals": list(report.residuals),
        }

    @app.post("/metrics", response_model=schemas.MetricsResponse)
    def metrics(req: schemas.MetricsRequest):
        report = evaluate(imageio.load_image(req.ref_path), imageio.load_image(req.test_path))
        infinite = math.isinf(report.psnr_db)
        return {
            "psnr_db": None if infinite else report.psnr_db,
            "psnr_infinite": infinite,
            "ssim": report.ssim,
            "artifact_power": report.artifact_power,
        }

    @app.post("/metrics/manifest", response_model=schemas.ManifestMetricsResponse)
    def metrics_manifest(req: schemas.ManifestMetricsRequest):
        csv = run_metrics(req.manifest_path)
        return {"csv": csv, "rows": len(csv.strip().splitlines()) - 1}

    @app.post("/dataset", response_model=schemas.DatasetResponse)
    def dataset(req: schemas.DatasetRequest):
        cfg = ExperimentConfig(
            n=req.n,
            shots=req.shots,
            trajectory=req.trajectory,
            max_rotation_deg=req.max_rotation_deg,
            max_translation_px=req.max_translation_px,
            n_coils=req.n_coils,
            source=req.source,
            samples=req.samples,
            repeats=req.repeats,
            train_frac=req.train_frac,
            seed=req.seed,
        )
        manifest = run_dataset(cfg, req.out_dir)
        train = sum(1 for e in manifest.entries if e.split == "train")
        return {
            "manifest_path": str(manifest.path),
            "samples": len(manifest.entries),
            "train_samples": train,
            "test_samples": len(manifest.entries) - train,
        }

    @app.post("/masks", response_model=schemas.MasksResponse)
    def masks(req: schemas.MasksRequest):
        traj = make_trajectory(req.kind, req.n, req.shots, seed=req.seed)
        out = Path(req.out_dir)
        paths = []
        for s in range(traj.n_shots):
            path = out / f"{req.kind.value}_s{traj.n_shots}_shot{s:03d}.png"
            imageio.export_mask_png(path, traj.masks[s])
            paths.append(str(path))
        return {"paths": paths}

    return app


app = create_app()
