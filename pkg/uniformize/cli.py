import json
from collections.abc import Callable
from pathlib import Path

import typer
from rich.console import Console
from rich.table import Table

from uniformize.core.exceptions import ConfigurationError, UniformizeError

console = Console()
cli_app = typer.Typer(name="uniformize", help="Grid uniformization toolkit", no_args_is_help=True)

CONFIG = typer.Option(None, "--config", help="Run configuration (JSON or YAML)")
OUT = typer.Option(None, "--out", help="Output directory")
H = typer.Option(None, "--h", help="Grid spacing, overrides the config")
ROUTE = typer.Option(None, "--route", help="Green route: DIRECT, PERRON or BOTH")
SEED = typer.Option(None, "--seed", help="Seed for every random draw")


@cli_app.callback()
def main(log_level: str = typer.Option(None, "--log-level", help="Log level (default from settings)")):
    from uniformize.core.logging import configure_logging

    configure_logging(log_level)


def _run(body: Callable[[], int]) -> None:
    """Run a command body, mapping toolkit errors to their exit codes."""
    try:
        code = body()
    except UniformizeError as exc:
        console.print_json(json.dumps(exc.to_dict(), sort_keys=True))
        raise typer.Exit(code=exc.exit_code) from exc
    raise typer.Exit(code=code)


def _load(command: str, config: Path | None, **overrides):
    from uniformize.schemas.run import load_run_config

    if overrides.get("route"):
        overrides["route"] = overrides["route"].upper()
    return load_run_config(config, command=command, **overrides)


def _summary(title: str, rows: dict) -> None:
    table = Table(title=title)
    table.add_column("Field", style="cyan")
    table.add_column("Value")
    for key, value in rows.items():
        table.add_row(key, f"{value:.6g}" if isinstance(value, float) else str(value))
    console.print(table)


def _green(cfg, domain, route: str):
    from uniformize.services.green import green_direct, green_perron

    if route == "PERRON":
        return green_perron(domain, cfg.pole_point)
    return green_direct(domain, cfg.pole_point, cfg.solver)


@cli_app.command("dirichlet")
def dirichlet(config: Path = CONFIG, out: str = OUT, h: float = H, route: str = ROUTE, seed: int = SEED):
    """Solve the Dirichlet problem for the configured boundary data."""

    def body() -> int:
        import numpy as np

        from uniformize.services import export
        from uniformize.services.domain import from_level_set
        from uniformize.services.harmonic import maximum_principle_report, solve_dirichlet

        cfg = _load("dirichlet", config, out=out, h=h, route=route, seed=seed)
        domain = from_level_set(cfg.domain.level_spec(), cfg.h)
        f = cfg.boundary.function(cfg.seed)
        u = solve_dirichlet(domain, f, cfg.solver, tol=cfg.tolerances.tol_iter)
        report = maximum_principle_report(u).to_dict()
        with np.errstate(all="ignore"):
            reference = np.asarray(f(domain.z[domain.inside]), dtype=float)
        report["max_error"] = float(np.abs(u.values[domain.inside] - reference).max())
        report["solver"] = cfg.solver.value

        root = Path(cfg.out)
        export.write_grid_csv(root / "solution.csv", u, {"boundary": cfg.boundary.model_dump()})
        export.write_json(root / "maximum_principle.json", report)
        export.write_mask_pgm(root / "mask.pgm", domain)
        export.write_loops_csv(root / "boundary_loops.csv", domain)
        _summary("Dirichlet solution", {k: report[k] for k in ("interior_min", "interior_max", "max_error", "holds")})
        return 0 if report["holds"] else 3

    _run(body)


@cli_app.command("green")
def green(config: Path = CONFIG, out: str = OUT, h: float = H, route: str = ROUTE, seed: int = SEED):
    """Green function with a logarithmic pole, by the direct or Perron route."""

    def body() -> int:
        import numpy as np

        from uniformize.services import export
        from uniformize.services.domain import from_level_set

        cfg = _load("green", config, out=out, h=h, route=route, seed=seed)
        domain = from_level_set(cfg.domain.level_spec(), cfg.h)
        routes = ["DIRECT", "PERRON"] if cfg.route == "BOTH" else [cfg.route]
        root = Path(cfg.out)
        results = {}
        for name in routes:
            result = _green(cfg, domain, name)
            results[name] = result
            stem = name.lower()
            gray = export.write_field_pgm(root / f"green_{stem}.pgm", result.G.values, result.G.live_mask)
            export.write_grid_csv(root / f"green_{stem}.csv", result.G, {**result.sidecar(), "gray_mapping": gray})
            export.write_grid_csv(root / f"h_{stem}.csv", result.H, result.sidecar())

        report = {"routes": {name: r.sidecar() for name, r in results.items()}, "h": cfg.h}
        if len(results) == 2:
            live = results["DIRECT"].G.live_mask
            gap = np.abs(results["DIRECT"].G.values[live] - results["PERRON"].G.values[live])
            report["route_difference"] = float(gap.max())
            report["route_tolerance"] = 10 * cfg.h**2
        export.write_json(root / "green_report.json", report)
        _summary("Green function", {"routes": ",".join(results), "route_difference": report.get("route_difference", "-")})
        return 0

    _run(body)


def _imported_green(cfg, domain):
    from uniformize.services import export
    from uniformize.services.green.result import GreenRoute, green_from_values

    csv_path = Path(cfg.green_input)
    sidecar_path = csv_path.with_suffix(".json")
    try:
        sidecar = json.loads(sidecar_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"Cannot read Green sidecar {sidecar_path}: {exc}") from exc
    meta = sidecar.get("domain", {})
    if (meta.get("nx"), meta.get("ny"), meta.get("h")) != (domain.nx, domain.ny, domain.h):
        raise ConfigurationError("Imported Green function lives on a different grid.", details={"sidecar": meta})
    pole = complex(*sidecar.get("pole", (cfg.pole_point.real, cfg.pole_point.imag)))
    values = export.read_grid_csv(csv_path, domain)
    return green_from_values(domain, values, pole, GreenRoute(sidecar.get("tag", "DIRECT")))


@cli_app.command("map")
def map_(config: Path = CONFIG, out: str = OUT, h: float = H, route: str = ROUTE, seed: int = SEED):
    """Uniformizing map exp(-G - iF) onto the unit disk, with diagnostics."""

    def body() -> int:
        from uniformize.services import export
        from uniformize.services.conformal import assemble_map, harmonic_conjugate, injectivity_scan
        from uniformize.services.domain import from_level_set

        cfg = _load("map", config, out=out, h=h, route=route, seed=seed)
        domain = from_level_set(cfg.domain.level_spec(), cfg.h)
        if cfg.green_input:
            green_fn = _imported_green(cfg, domain)
        else:
            green_fn = _green(cfg, domain, "PERRON" if cfg.route == "PERRON" else "DIRECT")
        conjugate = harmonic_conjugate(green_fn, tol_flux=cfg.tolerances.tol_flux)
        m = assemble_map(green_fn, conjugate)
        degree = injectivity_scan(m, sample_count=cfg.samples, seed=cfg.seed)

        root = Path(cfg.out)
        export.write_map_csv(root / "map.csv", m.phi.values, domain)
        export.write_json(
            root / "map_report.json",
            {"map": m.summary(), "conjugate": conjugate.to_dict(), "injectivity": degree.to_dict()},
        )
        _summary(
            "Uniformizing map",
            {
                "conformal_radius": m.conformal_radius,
                "period": conjugate.period,
                "cr_residual": m.diagnostics["cr_residual"],
                "injective": degree.passed,
            },
        )
        return 0 if degree.passed else 3

    _run(body)


@cli_app.command("exhaust")
def exhaust(config: Path = CONFIG, out: str = OUT, h: float = H, route: str = ROUTE, seed: int = SEED):
    """Normalized maps on nested sublevel domains and the convergence verdict."""

    def body() -> int:
        from uniformize.services import export
        from uniformize.services.conformal import ExhaustionConfig, run_exhaustion
        from uniformize.services.green import GreenRoute

        cfg = _load("exhaust", config, out=out, h=h, route=route, seed=seed)
        levels = cfg.levels or [cfg.domain.a]
        spec = cfg.domain.level_spec(a=levels[-1])
        ex_cfg = ExhaustionConfig(
            route=GreenRoute.PERRON if cfg.route == "PERRON" else GreenRoute.DIRECT,
            tol_conv=cfg.tolerances.tol_conv,
            divergence_ratio=cfg.tolerances.divergence_ratio,
        )
        report = run_exhaustion(spec, levels, cfg.h, ex_cfg)
        export.write_json(Path(cfg.out) / "exhaustion_report.json", report.to_dict())

        table = Table(title=f"Exhaustion: {report.verdict.value}")
        for column in ("level", "conformal radius", "delta"):
            table.add_column(column)
        for record in report.records:
            delta = "-" if record.delta is None else f"{record.delta:.3e}"
            table.add_row(f"{record.level:g}", f"{record.conformal_radius:.6f}", delta)
        console.print(table)
        return 0

    _run(body)


@cli_app.command("verify")
def verify(
    suite: str = typer.Argument("all", help="Suite name or 'all'"),
    config: Path = CONFIG,
    out: str = OUT,
    seed: int = SEED,
):
    """Run acceptance suites and write a deterministic JSON report."""

    def body() -> int:
        from uniformize.services import export
        from uniformize.services.verify import run_suites

        cfg = _load("verify", config, out=out, seed=seed, suite=suite)
        report = run_suites(cfg.suite, cfg.seed)
        export.write_json(Path(cfg.out) / f"verify_{cfg.suite}.json", report.model_dump())

        table = Table(title=f"Verification (seed {report.seed})")
        table.add_column("Suite", style="cyan")
        table.add_column("Result")
        for item in report.suites:
            table.add_row(item.suite, "[green]PASS[/green]" if item.passed else "[red]FAIL[/red]")
        console.print(table)
        return 0 if report.passed else 3

    _run(body)


if __name__ == "__main__":
    cli_app()
