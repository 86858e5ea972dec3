"""Command-line client for the mrishot service.

By default every command serves its request through the ASGI app in-process;
pass --server (or set MRISHOT_SERVER) to talk to a running instance instead.
Exit codes: 0 success, 2 validation error, 3 I/O error.
"""

import sys
import warnings

import click
import httpx

from .trajectory import TrajectoryKind

EXIT_VALIDATION = 2
EXIT_IO = 3

TRAJECTORY_CHOICE = click.Choice([k.value for k in TrajectoryKind])


class ServiceClient:
    def __init__(self, server: str | None):
        if server:
            self._client = httpx.Client(base_url=server, timeout=600.0)
        else:
            with warnings.catch_warnings():
                # starlette warns (UserWarning) about its httpx test transport
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

                from .service.app import create_app

                self._client = TestClient(create_app())

    def call(self, path: str, payload: dict) -> dict:
        resp = self._client.post(path, json=payload)
        if resp.status_code < 400:
            return resp.json()
        try:
            body = resp.json()
        except ValueError:
            body = {}
        if isinstance(body.get("detail"), list):  # FastAPI request validation
            message = "; ".join(f"{'.'.join(map(str, e.get('loc', [])))}: {e.get('msg')}" for e in body["detail"])
            kind = "validation"
        else:
            message = body.get("message", resp.text)
            kind = body.get("kind", "validation" if resp.status_code == 422 else "io")
        click.echo(f"error ({kind}): {message}", err=True)
        sys.exit(EXIT_VALIDATION if kind == "validation" else EXIT_IO)


@click.group()
@click.option("--server", envvar="MRISHOT_SERVER", default=None, help="Service URL; default runs in-process.")
@click.pass_context
def main(ctx, server):
    """Multishot MRI simulation and reconstruction toolkit."""
    ctx.obj = ServiceClient(server)


@main.command()
@click.option("--n", default=64, show_default=True, help="Grid size.")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--png", is_flag=True, help="Write an 8-bit raster instead of raw-f32.")
@click.pass_obj
def phantom(client, n, out_path, png):
    """Write the analytic head phantom to a file."""
    result = client.call("/phantom", {"n": n, "out_path": out_path, "png": png})
    click.echo(f"wrote {result['path']} ({result['n']}x{result['n']})")


@main.command()
@click.option("--clean", "clean_path", type=click.Path(), default=None, help="Ground-truth image; default phantom.")
@click.option("--n", default=64, show_default=True)
@click.option("--shots", default=8, show_default=True)
@click.option("--trajectory", type=TRAJECTORY_CHOICE, default=TrajectoryKind.RANDOM.value, show_default=True)
@click.option("--rotation", default=5.0, show_default=True, help="Max per-shot rotation (degrees).")
@click.option("--translation", default=0.0, show_default=True, help="Max per-shot translation (pixels).")
@click.option("--coils", "n_coils", default=4, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out-dir", required=True, type=click.Path())
@click.pass_obj
def simulate(client, clean_path, n, shots, trajectory, rotation, translation, n_coils, seed, out_dir):
    """Generate motion-corrupted multi-coil k-space from a clean image."""
    result = client.call(
        "/simulate",
        {
            "clean_path": clean_path,
            "n": n,
            "shots": shots,
            "trajectory": trajectory,
            "max_rotation_deg": rotation,
            "max_translation_px": translation,
            "n_coils": n_coils,
            "seed": seed,
            "out_dir": out_dir,
        },
    )
    click.echo(f"wrote {result['kspace_path']} and {result['coils_path']}")
    click.echo(f"sampled positions per coil: {result['sampled_positions']}")


@main.command()
@click.option("--kspace", "kspace_path", required=True, type=click.Path())
@click.option("--coils", "coils_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--max-iters", default=50, show_default=True)
@click.option("--tol", default=1e-8, show_default=True)
@click.option("--precondition/--no-precondition", default=True, show_default=True)
@click.option("--log", "log_path", type=click.Path(), default=None, help="Write iter,residual lines here.")
@click.pass_obj
def reconstruct(client, kspace_path, coils_path, out_path, max_iters, tol, precondition, log_path):
    """Reconstruct saved k-space with CG-SENSE."""
    result = client.call(
        "/reconstruct",
        {
            "kspace_path": kspace_path,
            "coils_path": coils_path,
            "out_path": out_path,
            "max_iters": max_iters,
            "tol": tol,
            "precondition": precondition,
        },
    )
    if log_path:
        with open(log_path, "w", encoding="utf-8") as fh:
            for i, r in enumerate(result["residuals"]):
                fh.write(f"{i},{r:.12e}\n")
    status = "converged" if result["converged"] else "max iterations reached"
    click.echo(f"wrote {result['path']} after {result['iterations']} iterations ({status})")


@main.command()
@click.option("--ref", "ref_path", type=click.Path(), default=None)
@click.option("--test", "test_path", type=click.Path(), default=None)
@click.option("--manifest", "manifest_path", type=click.Path(), default=None)
@click.option("--out", "out_path", type=click.Path(), default=None, help="Write CSV here instead of stdout.")
@click.pass_obj
def metrics(client, ref_path, test_path, manifest_path, out_path):
    """Score one image pair, or every pair in a dataset manifest, as CSV."""
    if manifest_path is not None:
        result = client.call("/metrics/manifest", {"manifest_path": manifest_path})
        csv = result["csv"]
    elif ref_path is not None and test_path is not None:
        result = client.call("/metrics", {"ref_path": ref_path, "test_path": test_path})
        psnr = "inf" if result["psnr_infinite"] else repr(result["psnr_db"])
        csv = f"psnr_db,ssim,artifact_power\n{psnr},{result['ssim']!r},{result['artifact_power']!r}\n"
    else:
        click.echo("error (validation): pass either --manifest or both --ref and --test", err=True)
        sys.exit(EXIT_VALIDATION)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(csv)
        click.echo(f"wrote {out_path}")
    else:
        click.echo(csv, nl=False)


@main.command()
@click.option("--n", default=64, show_default=True)
@click.option("--shots", default=16, show_default=True)
@click.option("--trajectory", type=TRAJECTORY_CHOICE, default=TrajectoryKind.RANDOM.value, show_default=True)
@click.option("--rotation", default=5.0, show_default=True)
@click.option("--translation", default=0.0, show_default=True)
@click.option("--coils", "n_coils", default=4, show_default=True)
@click.option("--source", default="phantom", show_default=True, help="'phantom' or a directory of images.")
@click.option("--samples", default=20, show_default=True)
@click.option("--repeats", default=1, show_default=True)
@click.option("--train-frac", default=0.7, show_default=True)
@click.option("--seed", required=True, type=int, help="Dataset seed (mandatory for reproducibility).")
@click.option("--out-dir", required=True, type=click.Path())
@click.pass_obj
def dataset(client, n, shots, trajectory, rotation, translation, n_coils, source, samples, repeats, train_frac, seed, out_dir):
    """Generate a paired clean/corrupted dataset plus manifest."""
    result = client.call(
        "/dataset",
        {
            "n": n,
            "shots": shots,
            "trajectory": trajectory,
            "max_rotation_deg": rotation,
            "max_translation_px": translation,
            "n_coils": n_coils,
            "source": source,
            "samples": samples,
            "repeats": repeats,
            "train_frac": train_frac,
            "seed": seed,
            "out_dir": out_dir,
        },
    )
    click.echo(
        f"wrote {result['manifest_path']}: {result['samples']} samples "
        f"({result['train_samples']} train / {result['test_samples']} test)"
    )


@main.command("export-masks")
@click.option("--kind", type=TRAJECTORY_CHOICE, required=True)
@click.option("--n", default=64, show_default=True)
@click.option("--shots", default=2, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out-dir", required=True, type=click.Path())
@click.pass_obj
def export_masks(client, kind, n, shots, seed, out_dir):
    """Write each shot's sampling mask as an 8-bit raster."""
    result = client.call("/masks", {"kind": kind, "n": n, "shots": shots, "seed": seed, "out_dir": out_dir})
    for path in result["paths"]:
        click.echo(f"wrote {path}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("mrishot.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
