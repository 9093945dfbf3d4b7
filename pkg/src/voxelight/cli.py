"""Command-line interface.

The CLI is a thin client of the HTTP service: by default it mounts the
FastAPI app in process (no socket), and `--server URL` points every
command at a remote instance instead.  Diagnostics go to standard error;
only file payloads touch the declared output paths.

Exit codes: 0 success, 1 usage error, 2 input/validation error,
3 internal error.
"""

from __future__ import annotations

import base64
import sys
from typing import Optional

import click

import voxelight

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_INTERNAL = 3


class ServiceClient:
    """Uniform JSON transport over either an in-process app or a real server."""

    def __init__(self, server: Optional[str] = None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server.rstrip("/"), timeout=600.0)
        else:
            from fastapi.testclient import TestClient

            from voxelight.service import app

            self._client = TestClient(app, raise_server_exceptions=False)

    def get(self, path: str):
        r = self._client.get(path)
        return r.status_code, r.json()

    def post(self, path: str, payload: dict):
        r = self._client.post(path, json=payload)
        return r.status_code, r.json()


class CliFailure(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        self.message = message


def _check(status: int, data):
    """Map service failures onto exit codes."""
    if status < 400:
        return data
    if status >= 500:
        raise CliFailure(EXIT_INTERNAL, f"internal service error ({status})")
    if isinstance(data, dict) and "error" in data:
        raise CliFailure(EXIT_INVALID, f"{data['error']}: {data['detail']}")
    raise CliFailure(EXIT_INVALID, f"request rejected ({status}): {data}")


def _read_file(path: str, what: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as e:
        raise CliFailure(EXIT_INVALID, f"cannot read {what} {path!r}: {e.strerror}")


def _write_file(path: str, data: bytes, what: str):
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as e:
        raise CliFailure(EXIT_INTERNAL, f"cannot write {what} {path!r}: {e.strerror}")


@click.group()
@click.version_option(voxelight.__version__, "--version")
@click.option("--server", default=None, metavar="URL",
              help="Use a running service instead of the in-process app.")
@click.pass_context
def cli(ctx, server):
    """Volumetric voxel cloud tools: generate, validate, inspect, render."""
    ctx.obj = {"server": server}


def _client(ctx) -> ServiceClient:
    return ServiceClient(ctx.obj["server"])


@cli.command()
@click.option("--scene", required=True, help="Demo scene name.")
@click.option("--out", required=True, type=click.Path(dir_okay=False),
              help="Output cloud file (.ply).")
@click.option("--scene-out", default=None, type=click.Path(dir_okay=False),
              help="Also write the scene config JSON here.")
@click.option("--quantize", type=click.Choice(["float32", "uint8"]),
              default="float32", show_default=True)
@click.option("--encoding", type=click.Choice(["ascii", "binary_little_endian"]),
              default="binary_little_endian", show_default=True)
@click.pass_context
def generate(ctx, scene, out, scene_out, quantize, encoding):
    """Write a synthetic demo cloud (and optionally its scene configs)."""
    status, data = _client(ctx).post(
        "/generate", {"scene": scene, "quantize": quantize, "encoding": encoding}
    )
    data = _check(status, data)
    _write_file(out, base64.b64decode(data["cloud_b64"]), "cloud")
    click.echo(f"wrote {out}", err=True)
    if scene_out:
        import json

        configs = data["configs"]
        for i, item in enumerate(configs):
            if len(configs) == 1:
                path = scene_out
            else:
                stem, dot, ext = scene_out.rpartition(".")
                path = f"{stem}.{item['label']}.{ext}" if dot else f"{scene_out}.{item['label']}"
            doc = json.dumps(item["config"], indent=2) + "\n"
            _write_file(path, doc.encode("utf-8"), "scene config")
            click.echo(f"wrote {path}", err=True)


@cli.command()
@click.option("--cloud", required=True, type=click.Path(dir_okay=False),
              help="Input cloud file.")
@click.option("--scene", "scene_path", required=True, type=click.Path(dir_okay=False),
              help="Scene config JSON.")
@click.option("--out", required=True, type=click.Path(dir_okay=False),
              help="Output image (.ppm).")
@click.option("--spp", type=click.IntRange(min=1), default=None,
              help="Samples per pixel override.")
@click.option("--depth", type=click.IntRange(min=1), default=None,
              help="Maximum bounce depth override.")
@click.option("--seed", type=click.IntRange(min=0), default=None,
              help="Random seed override.")
@click.option("--width", type=click.IntRange(min=1), default=None)
@click.option("--height", type=click.IntRange(min=1), default=None)
@click.option("--workers", type=click.IntRange(min=1), default=None,
              help="Render thread count (output is identical for any value).")
@click.pass_context
def render(ctx, cloud, scene_path, out, spp, depth, seed, width, height, workers):
    """Render a cloud under a scene config to a binary PPM."""
    import json

    from voxelight.errors import VoxelightError
    from voxelight.formats import parse_scene

    cloud_bytes = _read_file(cloud, "cloud")
    scene_bytes = _read_file(scene_path, "scene config")
    try:
        config = parse_scene(scene_bytes)
    except VoxelightError as e:
        raise CliFailure(EXIT_INVALID, str(e))

    overrides = {
        k: v
        for k, v in (
            ("spp", spp), ("max_depth", depth), ("seed", seed),
            ("width", width), ("height", height), ("workers", workers),
        )
        if v is not None
    }
    status, data = _client(ctx).post(
        "/render",
        {
            "cloud_b64": base64.b64encode(cloud_bytes).decode("ascii"),
            "config": json.loads(config.model_dump_json(exclude_none=True)),
            "overrides": overrides,
        },
    )
    data = _check(status, data)
    _write_file(out, base64.b64decode(data["ppm_b64"]), "image")
    click.echo(f"wrote {out}", err=True)


@cli.command()
@click.option("--cloud", required=True, type=click.Path(dir_okay=False))
@click.pass_context
def validate(ctx, cloud):
    """Check a cloud file against every format invariant."""
    blob = _read_file(cloud, "cloud")
    status, data = _client(ctx).post(
        "/validate", {"cloud_b64": base64.b64encode(blob).decode("ascii")}
    )
    data = _check(status, data)
    click.echo(f"OK ({data['occupied']} occupied voxels)")


@cli.command()
@click.option("--cloud", required=True, type=click.Path(dir_okay=False))
@click.pass_context
def info(ctx, cloud):
    """Print cloud statistics: dims, voxel size, attribute ranges, presets."""
    import json

    blob = _read_file(cloud, "cloud")
    status, data = _client(ctx).post(
        "/info", {"cloud_b64": base64.b64encode(blob).decode("ascii")}
    )
    data = _check(status, data)
    click.echo(json.dumps(data, indent=2))


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from voxelight.service import app

    uvicorn.run(app, host=host, port=port)


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
        return EXIT_OK
    except CliFailure as e:
        click.echo(f"error: {e.message}", err=True)
        return e.code
    except click.exceptions.Exit as e:
        return EXIT_OK if e.exit_code == 0 else EXIT_USAGE
    except click.Abort:
        return EXIT_USAGE
    except click.UsageError as e:
        click.echo(f"usage error: {e.format_message()}", err=True)
        return EXIT_USAGE
    except Exception as e:  # pragma: no cover - defensive
        click.echo(f"internal error: {e}", err=True)
        return EXIT_INTERNAL


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
