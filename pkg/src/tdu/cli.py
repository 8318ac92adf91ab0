"""Command line interface.

Every verb works offline against a home directory. With ``--url`` the
policy, data, request, subject and ledger verbs talk to a running service
instead and print the same output.
"""

from __future__ import annotations

import dataclasses
import sys
from pathlib import Path
from typing import Any, Dict, Optional

import click

from . import scenario
from .compiler import DSLSyntaxError, format_theory, parse_theory
from .compiler.policy import CompileError, compile_policies, detect_conflicts, merge_theories
from .dataplane import (IngestError, TransformSpec, format_readings_csv, generate_synthetic,
                        transform)
from .enforcement import Decision, RequestError, explain
from .ledger import UsageRecord
from .platform import Platform, PlatformError, bench_tet, load_config, write_results
from .platform import api
from .tduo.codec import (TDUOParseError, data_item_to_dict, parse_usage_policy, policy_to_dict,
                         serialize_data_item)
from .tduo.model import ModelError

_ERRORS = (CompileError, DSLSyntaxError, IngestError, RequestError, PlatformError, ModelError, TDUOParseError,
           ValueError, OSError)


class Context:
    def __init__(self, home: Path, url: Optional[str], modal_conversion: bool,
                 ledger_path: Optional[Path]):
        self.home = home
        self.url = url.rstrip("/") if url else None
        self.modal_conversion = modal_conversion
        self.ledger_path = ledger_path
        self._platform: Optional[Platform] = None

    @property
    def platform(self) -> Platform:
        if self._platform is None:
            self._platform = Platform(self.home, modal_conversion=self.modal_conversion,
                                      ledger_path=self.ledger_path)
        return self._platform

    def http(self, method: str, path: str, **kwargs) -> Dict[str, Any]:
        import httpx

        try:
            resp = httpx.request(method, self.url + path, timeout=30.0, **kwargs)
        except httpx.HTTPError as exc:
            raise click.ClickException(f"service unreachable at {self.url}: {exc}") from None
        if resp.status_code >= 400:
            try:
                detail = resp.json().get("detail", resp.text)
            except ValueError:
                detail = resp.text
            raise click.ClickException(f"service error {resp.status_code}: {detail}")
        return resp.json()


pass_ctx = click.make_pass_decorator(Context)


def _fail(exc: Exception):
    raise click.ClickException(str(exc)) from None


@click.group()
@click.option("--home", type=click.Path(path_type=Path), envvar="TDU_HOME", default="tdu-home",
              show_default=True, help="Platform data directory for offline use.")
@click.option("--url", envvar="TDU_URL", default=None, help="Talk to a running service instead.")
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path), default=None,
              help="JSON config file (data-dir, ledger-path, modal-conversion).")
@click.option("--modal-conversion/--no-modal-conversion", default=None,
              help="Derive [P]p from [O]p (default on).")
@click.pass_context
def main(ctx, home, url, config_path, modal_conversion):
    """Trust-based data usage: policies, enforcement, data release and the usage ledger."""
    ledger_path = None
    conversion = True
    if config_path is not None:
        cfg = load_config(config_path)
        home, ledger_path, conversion = cfg.data_dir, cfg.ledger_path, cfg.modal_conversion
    if modal_conversion is not None:
        conversion = modal_conversion
    ctx.obj = Context(home, url, conversion, ledger_path)


# -- policy -------------------------------------------------------------------------

@main.group()
def policy():
    """Register, list and check usage policies."""


@policy.command("add")
@click.argument("files", nargs=-1, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--scenario", "use_scenario", is_flag=True,
              help="Register the owner, municipal and commercial policies and subjects d, m, c.")
@pass_ctx
def policy_add(c: Context, files, use_scenario):
    """Register TDUO policy documents (.xml or .json)."""
    if not files and not use_scenario:
        raise click.UsageError("give policy files or --scenario")
    try:
        policies = [parse_usage_policy(f.read_bytes(), "json" if f.suffix == ".json" else "xml")
                    for f in files]
    except _ERRORS as exc:
        _fail(exc)
    if use_scenario:
        policies = list(scenario.POLICIES) + policies
    for p in policies:
        try:
            if c.url:
                c.http("POST", "/policies", json=policy_to_dict(p))
            else:
                c.platform.add_policy(p)
        except _ERRORS as exc:
            _fail(exc)
        click.echo(f"added {p.name}")
    if use_scenario:
        for name, actor in scenario.SUBJECTS.items():
            if c.url:
                c.http("POST", "/subjects", json={"name": name, "actorClass": actor.value})
            else:
                c.platform.add_subject(name, actor)
            click.echo(f"subject {name}: {actor.value}")


@policy.command("list")
@click.option("--json", "as_json", is_flag=True)
@pass_ctx
def policy_list(c: Context, as_json):
    payload = c.http("GET", "/policies") if c.url else api.policies_payload(c.platform)
    if as_json:
        click.echo(api.dumps(payload))
        return
    for p in payload["policies"]:
        click.echo(f"{p['Name']}  ({len(p['Rule'])} rule(s))")


def _theory(c: Context, theory_files):
    """Registered policies compiled and merged with any ``.dl`` theory files."""
    parts = [compile_policies(c.platform.policies(), modal_conversion=c.modal_conversion)]
    for f in theory_files:
        try:
            parts.append(parse_theory(f.read_text(encoding="utf-8")))
        except DSLSyntaxError as exc:
            raise click.ClickException(f"{f}: {exc}") from None
    return dataclasses.replace(merge_theories(parts), modal_conversion=c.modal_conversion)


@policy.command("check")
@click.argument("theory_files", nargs=-1, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@pass_ctx
def policy_check(c: Context, theory_files):
    """Compile and merge all policies (plus .dl theory files), then report unresolved conflicts."""
    if c.url and not theory_files:
        summary = c.http("GET", "/policies/check")["summary"]
        click.echo(summary)
        if summary != "no conflicts":
            sys.exit(1)
        return
    try:
        report = detect_conflicts(_theory(c, theory_files))
    except _ERRORS as exc:
        _fail(exc)
    click.echo(str(report))
    if not report.empty:
        sys.exit(1)


@policy.command("compile")
@click.argument("theory_files", nargs=-1, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@pass_ctx
def policy_compile(c: Context, theory_files):
    """Print the canonical theory text of the registered policies (plus .dl theory files)."""
    try:
        click.echo(format_theory(_theory(c, theory_files)), nl=False)
    except _ERRORS as exc:
        _fail(exc)


# -- subjects ------------------------------------------------------------------------

@main.group()
def subject():
    """Register consumers and their actor class."""


@subject.command("add")
@click.argument("name")
@click.argument("actor")
@pass_ctx
def subject_add(c: Context, name, actor):
    try:
        if c.url:
            c.http("POST", "/subjects", json={"name": name, "actorClass": actor})
        else:
            c.platform.add_subject(name, actor)
    except _ERRORS as exc:
        _fail(exc)
    click.echo(f"subject {name}: {actor}")


@subject.command("list")
@pass_ctx
def subject_list(c: Context):
    subjects = (c.http("GET", "/subjects")["subjects"] if c.url
                else {k: v.value for k, v in c.platform.subjects().items()})
    for name, actor in subjects.items():
        click.echo(f"{name}\t{actor}")


# -- data ----------------------------------------------------------------------------

@main.group()
def data():
    """Import, generate and transform sensor readings."""


@data.command("ingest")
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@pass_ctx
def data_ingest(c: Context, file: Path):
    """Import a readings CSV file."""
    text = file.read_text(encoding="utf-8")
    try:
        if c.url:
            out = c.http("POST", "/data/readings", content=text.encode("utf-8"),
                         headers={"content-type": "text/csv"})
        else:
            added, dups = c.platform.ingest_csv(text)
            out = {"added": added, "duplicates": dups, "total": len(c.platform.dataset)}
    except _ERRORS as exc:
        _fail(exc)
    click.echo(f"added {out['added']} reading(s), {out['duplicates']} duplicate(s) skipped, "
               f"{out['total']} total")


@data.command("gen")
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--count", type=click.IntRange(min=0), default=1000, show_default=True)
@click.option("--zones", type=click.IntRange(min=1), default=2, show_default=True)
@click.option("--streets-per-zone", type=click.IntRange(min=1), default=3, show_default=True)
@click.option("--span", type=click.IntRange(min=1), default=30 * 86400, show_default=True,
              help="Time span in seconds.")
@click.option("--out", "out", type=click.Path(dir_okay=False, path_type=Path), required=False,
              help="CSV file to write (default: stdout).")
def data_gen(seed, count, zones, streets_per_zone, span, out):
    """Generate seeded synthetic readings as CSV (an empty file when count is 0)."""
    readings = generate_synthetic(seed, count, streets_per_zone, zones, span)
    text = format_readings_csv(readings) if readings else ""
    if out is None:
        click.echo(text, nl=False)
    else:
        out.write_text(text, encoding="utf-8")


@data.command("transform")
@click.option("--spatial", default="any", show_default=True)
@click.option("--temporal", default="any", show_default=True)
@click.option("--abstraction", default="any", show_default=True)
@click.option("--start", type=float, default=None)
@click.option("--end", type=float, default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "xml"]), default="json", show_default=True)
@pass_ctx
def data_transform(c: Context, spatial, temporal, abstraction, start, end, fmt):
    """Apply a transform to the stored readings (no policy check)."""
    try:
        spec = TransformSpec(spatial, temporal, abstraction)
        window = None
        if start is not None or end is not None:
            window = (start if start is not None else 0.0, end if end is not None else float("inf"))
        items = transform(c.platform.dataset, spec, window)
    except _ERRORS as exc:
        _fail(exc)
    if fmt == "json":
        click.echo(api.dumps({"items": [data_item_to_dict(i) for i in items]}))
    else:
        for item in items:
            click.echo(serialize_data_item(item).decode("utf-8"))


# -- requests ------------------------------------------------------------------------

@main.group()
def request():
    """Evaluate consumer requests."""


@request.command("eval")
@click.option("--actor", required=True, help="DataOwner/MunicipalAuthority/CommercialOperator or DO/MA/CO.")
@click.option("--spatial", required=True)
@click.option("--temporal", required=True)
@click.option("--abstraction", required=True)
@click.option("--purpose", default=None)
@click.option("--subject", default=None, help="Registered subject (default: the actor class itself).")
@click.option("--entity-type", default=None)
@click.option("--entity-id", default=None, help="Shell-style pattern over entity ids.")
@click.option("--start", type=float, default=None)
@click.option("--end", type=float, default=None)
@click.option("--json", "as_json", is_flag=True, help="Print the full decision payload.")
@pass_ctx
def request_eval(c: Context, actor, spatial, temporal, abstraction, purpose, subject, entity_type,
                 entity_id, start, end, as_json):
    """Decide a request; granted requests also release the transformed data."""
    body: Dict[str, Any] = {"actorClass": actor, "spatial": spatial, "temporal": temporal,
                            "abstraction": abstraction}
    if purpose:
        body["purpose"] = purpose
    if subject:
        body["subject"] = subject
    if entity_type or entity_id:
        body["target"] = {k: v for k, v in (("entityType", entity_type), ("entityId", entity_id)) if v}
    if start is not None or end is not None:
        body["window"] = {"start": start if start is not None else 0.0,
                          "end": end if end is not None else 1e18}
    try:
        payload = c.http("POST", "/query", json=body) if c.url else api.run_query(c.platform, body)
    except _ERRORS as exc:
        _fail(exc)
    if as_json:
        click.echo(api.dumps(payload))
        return
    decision = Decision.from_dict(payload["decision"])
    click.echo(explain(decision), nl=False)
    if decision.granted:
        click.echo(f"Released {len(payload['items'])} data item(s).")
    click.echo(f"Ledger record {payload['recordId']}.")


# -- ledger --------------------------------------------------------------------------

@main.group()
def ledger():
    """Inspect the usage ledger."""


@ledger.command("history")
@click.option("--policy", default=None)
@click.option("--subject", default=None)
@click.option("--outcome", type=click.Choice(["Granted", "Refused"]), default=None)
@click.option("--since", type=float, default=None)
@click.option("--until", type=float, default=None)
@click.option("--json", "as_json", is_flag=True)
@pass_ctx
def ledger_history(c: Context, policy, subject, outcome, since, until, as_json):
    filters = {"policy": policy, "subject": subject, "outcome": outcome, "since": since,
               "until": until}
    if c.url:
        payload = c.http("GET", "/usage-history",
                         params={k: v for k, v in filters.items() if v is not None})
    else:
        payload = api.history_payload(c.platform, **filters)
    if as_json:
        click.echo(api.dumps(payload))
        return
    for obj in payload["records"]:
        r = UsageRecord.from_dict(obj)
        levels = f"{r.spatial}/{r.temporal}/{r.abstraction}" + (f"/{r.purpose}" if r.purpose else "")
        click.echo(f"{r.record_id}\t{r.timestamp:.3f}\t{r.subject}\t{r.actor_class}\t{levels}\t"
                   f"{r.outcome}\t{r.items_released}\t{','.join(r.policies)}")


# -- bench / serve -------------------------------------------------------------------

@main.command()
@click.option("--iterations", type=click.IntRange(min=2), default=50, show_default=True)
@click.option("--mode", type=click.Choice(["cold", "warm", "both"]), default="both", show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Directory for tet_stats.json and tet_table.csv.")
def bench(iterations, mode, out_dir):
    """Measure trust enforcement time on the scenario workload."""
    modes = ["cold", "warm"] if mode == "both" else [mode]
    results = [bench_tet(iterations, m) for m in modes]
    for r in results:
        click.echo(f"{r.mode}: mean {r.mean_ms:.3f} ms, 95% CI [{r.ci95_low_ms:.3f}, "
                   f"{r.ci95_high_ms:.3f}], min {r.min_ms:.3f}, max {r.max_ms:.3f} (n={r.iterations})")
    if out_dir is not None:
        paths = write_results(results, out_dir)
        click.echo(f"wrote {paths['stats']} and {paths['table']}")


@main.command()
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@pass_ctx
def serve(c: Context, host, port):
    """Run the HTTP service over the home directory."""
    from .platform import PlatformConfig
    from .service import ServeError, serve as run

    cfg = PlatformConfig(data_dir=c.home, ledger_path=c.ledger_path,
                         modal_conversion=c.modal_conversion)
    if host:
        cfg.host = host
    if port is not None:
        cfg.port = port
    try:
        run(cfg)
    except ServeError as exc:
        _fail(exc)


if __name__ == "__main__":
    main()
