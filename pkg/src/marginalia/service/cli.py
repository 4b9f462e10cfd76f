"""Admin CLI: ingest materials, provision users, seed fixture posts, export
reports, and run the HTTP server."""

from __future__ import annotations

import json
from pathlib import Path

import click

from ..gateway import Gateway
from ..providers import ProviderConfig, StubEmbedder, build_provider
from .config import ServiceConfig
from .core import ServiceCore
from .http import create_app, report_json
from .store import FileStore


def _build_core(store_path: str, provider_kind: str, script_path: str | None, model: str, endpoint: str | None, credential_env: str | None) -> ServiceCore:
    config = ServiceConfig.from_env()
    script = None
    if script_path:
        script = json.loads(Path(script_path).read_text(encoding="utf-8"))
    provider_config = ProviderConfig(
        provider_kind=provider_kind,
        model_name=model,
        endpoint=endpoint,
        credential_env=credential_env,
    )
    provider = build_provider(provider_config, script)
    return ServiceCore(
        store=FileStore(store_path),
        gateway=Gateway(provider, provider_config),
        embedder=StubEmbedder(config.embed_dim),
        config=config,
    )


store_option = click.option(
    "--store", "store_path", default="./marginalia-store", show_default=True,
    help="Directory backing the document store.",
)
provider_options = [
    click.option("--provider", "provider_kind", type=click.Choice(["stub", "live"]), default="stub", show_default=True),
    click.option("--script", "script_path", default=None, help="JSON stub script (stub provider only)."),
    click.option("--model", default="stub-model", show_default=True),
    click.option("--endpoint", default=None, help="Chat-completion endpoint URL (live provider)."),
    click.option("--credential-env", default=None, help="Env var holding the API key (live provider)."),
]


def with_provider_options(command):
    for option in reversed(provider_options):
        command = option(command)
    return command


@click.group()
def main():
    """Material-grounded discussion service administration."""


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--title", required=True)
@store_option
def ingest(path: str, title: str, store_path: str):
    """Parse, chunk, and index a material from a text file."""
    core = _build_core(store_path, "stub", None, "stub-model", None, None)
    material = core.ingest_material(title, Path(path).read_text(encoding="utf-8"))
    click.echo(
        f"ingested {material.id}: {len(material.paragraphs)} paragraphs "
        f"from {path!r}"
    )
    click.echo(material.id)


@main.command()
@click.argument("user_id")
@click.option("--token", default=None, help="Explicit token; generated when omitted.")
@store_option
def provision(user_id: str, token: str | None, store_path: str):
    """Create a user and print their session token."""
    core = _build_core(store_path, "stub", None, "stub-model", None, None)
    click.echo(core.provision_user(user_id, token))


@main.command()
@click.argument("material_id")
@click.argument("fixture", type=click.Path(exists=True, dir_okay=False))
@store_option
def seed(material_id: str, fixture: str, store_path: str):
    """Seed scripted posts from a JSON fixture file.

    The fixture is a list of objects with keys: author, anchor_paragraph,
    content, visibility, and optionally parent (index of an earlier entry).
    """
    core = _build_core(store_path, "stub", None, "stub-model", None, None)
    fixtures = json.loads(Path(fixture).read_text(encoding="utf-8"))
    created = core.seed_posts(material_id, fixtures)
    click.echo(f"seeded {len(created)} posts on {material_id}")


@main.command("export-report")
@click.argument("material_id")
@click.argument("user_id")
@click.option("-o", "--output", default="-", help="Output file; - for stdout.")
@store_option
@with_provider_options
def export_report(material_id: str, user_id: str, output: str, store_path: str,
                  provider_kind: str, script_path: str | None, model: str,
                  endpoint: str | None, credential_env: str | None):
    """Generate and export a user's learning report as JSON."""
    core = _build_core(store_path, provider_kind, script_path, model, endpoint, credential_env)
    user = core.store.get(f"user:{user_id}")
    if user is None:
        raise click.ClickException(f"unknown user {user_id!r}; provision first")
    token = user.payload["token"]
    payload = report_json(core.generate_report(token, material_id))
    text = json.dumps(payload, indent=2, sort_keys=True)
    if output == "-":
        click.echo(text)
    else:
        Path(output).write_text(text + "\n", encoding="utf-8")
        click.echo(f"report written to {output}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--frontend", "frontend_dist", default=None, help="Built UI directory to mount at /ui.")
@store_option
@with_provider_options
def serve(host: str, port: int, frontend_dist: str | None, store_path: str,
          provider_kind: str, script_path: str | None, model: str,
          endpoint: str | None, credential_env: str | None):
    """Run the HTTP service."""
    import uvicorn

    core = _build_core(store_path, provider_kind, script_path, model, endpoint, credential_env)
    app = create_app(core, frontend_dist=frontend_dist)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
