"""Batch command line: recipes in, CSV / JSON / SVG out.

    gaugelat butterfly --preset fig1a --out runs/fig1a
    gaugelat run --recipe my.ini --out runs/x --format csv --format svg
    gaugelat presets

Every run writes ``manifest.json`` (full recipe, its sha256, output file
hashes) and ``recipe.ini`` next to the data files, so ``gaugelat run
--recipe <out>/recipe.ini`` repeats it exactly.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from . import __version__
from .coupling import CouplingModel, aa_parameters
from .errors import FitFailure, GaugelatError, RecipeError
from .fractal import box_counting_dimension
from .gauge import gauge_field, nontrivial_field_test
from .geometry import build_dimer_chain, build_hedgehog_lattice
from .hamiltonian import assemble, dimer_basis_transform, reorganize_sa
from .harper import (AmoParameters, amo_matrix, isospectral_distance, effective_lambda_estimate,
                     small_lambda_couplings, variable_coupling_chain, variable_coupling_magnitudes)
from .output import ensure_dir, file_sha256, svg_figure, write_csv, write_json, write_text
from .recipes import (COMMANDS, RunRecipe, list_presets, load_preset, load_recipe, parse_float_list,
                      parse_int_list)
from .spectral import LocalizationThresholds, flux_sweep, lattice_constant_sweep, resolve_threads

log = logging.getLogger("gaugelat")

__all__ = ["main", "cmd_butterfly", "cmd_confinement", "cmd_gauge_portrait", "cmd_harper_check",
           "cmd_fractal", "run_recipe"]


# recipe -> library arguments

def model_from(recipe: RunRecipe) -> CouplingModel:
    m = recipe.section("model")
    return CouplingModel(float(m.get("delta0", 1.0)), float(m.get("lam", 1.0)), m.get("cutoff", "adjacent"),
                         m.get("radius"))


def geometry_from(recipe: RunRecipe) -> dict:
    g = recipe.section("geometry")
    fam = recipe.family
    if fam == "dimer-chain":
        return dict(N=int(g["N"]), L=float(g["L"]), d=float(g["d"]))
    if fam == "trimer-chain":
        out = dict(N_cells=int(g["N_cells"]))
        for k in ("R_cell", "r_trimer", "d"):
            if k in g:
                out[k] = float(g[k])
        for k in ("internal_angles", "deformations"):
            if k in g:
                out[k] = tuple(parse_float_list(g[k]))
        return out
    if fam == "hedgehog":
        out = dict(n=int(g["n"]), d=float(g["d"]))
        if "L" in g:
            out["L"] = float(g["L"])
        return out
    raise RecipeError([f"run.family: unknown family {fam!r}"])


def _sweep_ps(recipe):
    s = recipe.section("sweep")
    if "p" not in s:
        return None
    return parse_int_list(s["p"])


class _Run:
    """Collects written files and writes the manifest last."""

    def __init__(self, recipe: RunRecipe, out: str, command: str):
        self.recipe = recipe
        self.out = ensure_dir(out)
        self.command = command
        self.formats = recipe.formats()
        self.files: list[str] = []
        self.summary: dict = {}

    def path(self, name):
        return os.path.join(self.out, name)

    def wants(self, fmt):
        return fmt in self.formats

    def add(self, p):
        self.files.append(p)
        return p

    def finish(self) -> list[str]:
        self.add(write_text(self.path("recipe.ini"), self.recipe.to_ini()))
        manifest = dict(
            command=self.command,
            version=__version__,
            recipe=self.recipe.to_dict(),
            recipe_hash=self.recipe.hash(),
            outputs={os.path.basename(f): file_sha256(f) for f in self.files if not f.endswith(".svg")},
            figures=sorted(os.path.basename(f) for f in self.files if f.endswith(".svg")),
            summary=self.summary,
        )
        self.add(write_json(self.path("manifest.json"), manifest))
        return self.files


# commands

def cmd_butterfly(recipe: RunRecipe, out: str, threads=None) -> list[str]:
    """Spectrum against the turn number p for a chain family."""
    run = _Run(recipe, out, "butterfly")
    s = recipe.section("sweep")
    sweep = flux_sweep(recipe.family, geometry_from(recipe), _sweep_ps(recipe), s.get("band_filter", "all"),
                       model_from(recipe), s.get("boundary", "open"), int(s.get("sector", 3)), threads)
    if run.wants("csv"):
        run.add(write_csv(run.path("butterfly.csv"), ["param", "eigen_index", "energy"], sweep.rows()))
    run.summary = dict(n_params=len(sweep.records), levels=[len(w) for _, w in sweep.records][:1])
    if run.wants("svg"):
        def draw(fig):
            ax = fig.add_subplot()
            for p, w in sweep.records:
                ax.plot(np.full(len(w), p), w, ",", color="k")
            ax.set_xlabel("p")
            ax.set_ylabel("energy")
        run.add(svg_figure(run.path("butterfly.svg"), draw))
    return run.finish()


def cmd_confinement(recipe: RunRecipe, out: str, threads=None) -> list[str]:
    """Hedgehog spectrum against L, localization flags and the top-state density."""
    run = _Run(recipe, out, "confinement")
    g = geometry_from(recipe)
    s = recipe.section("sweep")
    Ls = parse_float_list(s.get("L", g.get("L", "")))
    if not Ls:
        raise RecipeError(["sweep.L: need at least one lattice constant"])
    th = LocalizationThresholds(float(s.get("ipr_factor", 10.0)), float(s.get("gap_fraction", 0.02)))
    sweep, reports = lattice_constant_sweep(g["n"], g["d"], Ls, model_from(recipe), th, threads)
    if run.wants("csv"):
        run.add(write_csv(run.path("spectrum_vs_L.csv"), ["param", "eigen_index", "energy"], sweep.rows()))
        run.add(write_csv(run.path("localization.csv"),
                          ["L", "eigen_index", "energy", "ipr", "gap", "bandwidth", "centroid_x", "centroid_y",
                           "localized"],
                          [(L, r.eigen_index, r.energy, r.ipr, r.gap, r.bandwidth, r.centroid[0], r.centroid[1],
                            r.localized) for L, r in zip(Ls, reports)]))
    lat = build_hedgehog_lattice(g["n"], Ls[0], g["d"])
    prob = reports[0].probability
    pos = lat.positions()
    k = lat.sites_per_polymer
    if run.wants("csv"):
        rows = [(lat.grid[i // k][0], lat.grid[i // k][1], i % k, pos[i, 0], pos[i, 1], prob[i])
                for i in range(len(prob))]
        run.add(write_csv(run.path("top_state.csv"), ["nx", "ny", "site", "x", "y", "prob"], rows))
    center = lat.centers.mean(axis=0)
    run.summary = dict(
        state_L=Ls[0],
        reports=[dict(L=L, ipr=r.ipr, gap=r.gap, bandwidth=r.bandwidth, localized=r.localized,
                      centroid_offset=r.centroid_offset(center) / L) for L, r in zip(Ls, reports)])
    if run.wants("svg"):
        def draw_spec(fig):
            ax = fig.add_subplot()
            for L, w in sweep.records:
                ax.plot(np.full(len(w), L), w, ",", color="k")
            for L, r in zip(Ls, reports):
                if r.localized:
                    ax.plot([L], [r.energy], "o", color="tab:blue")
            ax.set_xlabel("L")
            ax.set_ylabel("energy")
        run.add(svg_figure(run.path("spectrum_vs_L.svg"), draw_spec))

        def draw_state(fig):
            ax = fig.add_subplot()
            sc = ax.scatter(pos[:, 0], pos[:, 1], c=prob, s=8, cmap="viridis")
            fig.colorbar(sc, ax=ax, label="|psi|^2")
            ax.set_aspect("equal")
        run.add(svg_figure(run.path("top_state.svg"), draw_state))
    return run.finish()


def _grid_rows(arrays: dict):
    # arrays: name -> (ny, nx, 4) complex; rows (nx, ny, component, re, im)
    rows = []
    for name, a in arrays.items():
        ny, nx, _ = a.shape
        for c in range(4):
            for gy in range(ny):
                for gx in range(nx):
                    z = a[gy, gx, c]
                    re, im = (np.nan, np.nan) if np.isnan(z) else (z.real, z.imag)
                    rows.append((gx, gy, f"{name}{c}", float(re), float(im)))
    return rows


def cmd_gauge_portrait(recipe: RunRecipe, out: str, threads=None) -> list[str]:
    """Pauli components of A_x, A_y and B_z on the hedgehog array."""
    run = _Run(recipe, out, "portrait")
    g = geometry_from(recipe)
    s = recipe.section("sweep")
    L = float(g.get("L", s.get("L", 0.0)))
    lat = build_hedgehog_lattice(g["n"], L, g["d"])
    H = assemble(lat, model_from(recipe), s.get("boundary", "open"))
    F = gauge_field(H, s.get("basis", "sa"))
    if run.wants("csv"):
        run.add(write_csv(run.path("A_grid.csv"), ["nx", "ny", "component", "re", "im"],
                          _grid_rows({"Ax": F.A[0], "Ay": F.A[1]})))
        run.add(write_csv(run.path("Bz_grid.csv"), ["nx", "ny", "component", "re", "im"],
                          _grid_rows({"curl": F.Bz["curl"], "commutator": F.Bz["commutator"],
                                      "total": F.Bz["total"]})))
    _, diag = nontrivial_field_test(H)
    run.summary = dict(
        basis=F.basis,
        max_abs_A={f"{part}A{c}": F.max_abs("A", c, part) for part in ("re", "im") for c in range(4)},
        max_abs_commutator=[F.max_abs("commutator", c) for c in range(4)],
        max_abs_curl=[F.max_abs("curl", c) for c in range(4)],
        wilson_trace_deviation=diag["max_trace_deviation"])
    if run.wants("svg"):
        shown = [("im", 0), ("re", 1), ("im", 2), ("re", 3)]

        def draw_A(fig):
            for row, (lab, a) in enumerate((("A_x", F.A[0]), ("A_y", F.A[1]))):
                for col, (part, c) in enumerate(shown):
                    ax = fig.add_subplot(2, 4, 4 * row + col + 1)
                    f = np.imag if part == "im" else np.real
                    im = ax.imshow(f(a[..., c]), origin="upper", cmap="RdBu_r")
                    ax.set_title(f"{part.capitalize()} {lab}^{c}", fontsize=8)
                    ax.set_xticks([])
                    ax.set_yticks([])
                    fig.colorbar(im, ax=ax, shrink=0.7)
        run.add(svg_figure(run.path("A_portrait.svg"), draw_A, figsize=(11, 5)))

        def draw_B(fig):
            for c in range(4):
                ax = fig.add_subplot(1, 4, c + 1)
                im = ax.imshow(np.real(F.Bz["commutator"][..., c]), origin="upper", cmap="RdBu_r")
                ax.set_title(f"commutator sigma_{c}", fontsize=8)
                ax.set_xticks([])
                ax.set_yticks([])
                fig.colorbar(im, ax=ax, shrink=0.7)
        run.add(svg_figure(run.path("Bz_portrait.svg"), draw_B, figsize=(11, 3)))
    return run.finish()


def cmd_harper_check(recipe: RunRecipe, out: str, threads=None) -> list[str]:
    """Harper vs variable-coupling spectra, small-Lambda agreement and Lambda_eff fits."""
    run = _Run(recipe, out, "harper")
    s = recipe.section("sweep")
    Lam = float(s.get("Lambda", 1.0))
    distances = []
    for q in parse_int_list(s.get("q", "3, 5, 8, 13")):
        for m in parse_int_list(s.get("multiples", "1, 2")):
            om = 2 * np.pi / q
            dist = isospectral_distance(variable_coupling_chain(q * m, Lam, om),
                                        amo_matrix(AmoParameters(Lam, om, q * m)))
            distances.append(dict(q=q, N=q * m, omega=om, distance=dist))
    small = []
    phase = np.linspace(0, 2 * np.pi, 721)
    for lam_s in parse_float_list(s.get("small_Lambda", "0.01, 0.05, 0.1")):
        err = np.abs(variable_coupling_magnitudes(phase, lam_s, 1.0) - small_lambda_couplings(phase, lam_s, 1.0))
        small.append(dict(Lambda=lam_s, max_error=float(err.max()), bound=2 * lam_s**2,
                          within_bound=bool(err.max() < 2 * lam_s**2)))
    fits = []
    if recipe.section("geometry"):
        g = geometry_from(recipe)
        model = model_from(recipe)
        amp = aa_parameters(g["L"], g["d"], model.lam)[3]
        N = g["N"]
        min_cos = float(s.get("min_cos", 0.3))
        for p in parse_int_list(s.get("p", f"1:{N - 2}")):
            om = 2 * np.pi * p / (N - 1)
            if abs(np.cos(om)) <= min_cos:
                continue
            dec = reorganize_sa(dimer_basis_transform(assemble(build_dimer_chain(N, p, g["L"], g["d"]), model)))
            row = dict(p=p, omega=om, target=0.08 * abs(np.cos(om)), model_target=amp * abs(np.cos(om)))
            try:
                lam_eff, chi, base = effective_lambda_estimate(np.diag(dec.H_A.matrix, 1), 2 * om)
                row.update(Lambda_eff=lam_eff, chi=chi, baseline=base,
                           relative_error=abs(lam_eff / row["target"] - 1))
            except FitFailure as e:
                row.update(Lambda_eff=None, unidentifiable=str(e))
            fits.append(row)
    report = dict(Lambda=Lam, isospectral=distances, small_lambda=small, lambda_eff=fits)
    run.summary = dict(max_distance=max((d["distance"] for d in distances), default=0.0),
                       n_fits=len(fits))
    run.add(write_json(run.path("harper_report.json"), report))
    if run.wants("csv"):
        run.add(write_csv(run.path("isospectral.csv"), ["q", "N", "distance"],
                          [(d["q"], d["N"], d["distance"]) for d in distances]))
        run.add(write_csv(run.path("lambda_eff.csv"), ["param", "Lambda_eff", "target"],
                          [(f["p"], f["Lambda_eff"] if f["Lambda_eff"] is not None else float("nan"), f["target"])
                           for f in fits]))
    if run.wants("svg") and fits:
        def draw(fig):
            ax = fig.add_subplot()
            ok = [f for f in fits if f["Lambda_eff"] is not None]
            ax.plot([f["omega"] for f in ok], [f["Lambda_eff"] for f in ok], "o", ms=3, label="fit")
            ax.plot([f["omega"] for f in ok], [f["target"] for f in ok], "-", label="0.08|cos w|")
            ax.set_xlabel("omega")
            ax.legend()
        run.add(svg_figure(run.path("lambda_eff.svg"), draw))
    return run.finish()


def cmd_fractal(recipe: RunRecipe, out: str, threads=None) -> list[str]:
    """Box-counting dimension of the selected band for each p."""
    run = _Run(recipe, out, "fractal")
    s = recipe.section("sweep")
    sweep = flux_sweep(recipe.family, geometry_from(recipe), _sweep_ps(recipe), s.get("band_filter", "all"),
                       model_from(recipe), s.get("boundary", "open"), int(s.get("sector", 3)), threads)
    fits = [(p, box_counting_dimension(w)) for p, w in sweep.records]
    rows = [(p, f.D, f.residual) for p, f in fits]
    if run.wants("csv"):
        run.add(write_csv(run.path("fractal.csv"), ["param", "D", "residual"], rows))
    run.summary = dict(dimensions={str(p): f.D for p, f in fits},
                       degenerate=[p for p, f in fits if f.degenerate])
    if run.wants("svg") and rows:
        def draw(fig):
            ax = fig.add_subplot()
            ax.errorbar([r[0] for r in rows], [r[1] for r in rows], yerr=[r[2] for r in rows], fmt="o", ms=3)
            ax.set_xlabel("p")
            ax.set_ylabel("D")
        run.add(svg_figure(run.path("fractal.svg"), draw))
    return run.finish()


COMMAND_TABLE = {
    "butterfly": cmd_butterfly,
    "confinement": cmd_confinement,
    "portrait": cmd_gauge_portrait,
    "harper": cmd_harper_check,
    "fractal": cmd_fractal,
}


def run_recipe(recipe: RunRecipe, out: str, command: str | None = None, threads=None) -> list[str]:
    command = command or recipe.command
    if command != recipe.command:
        recipe = recipe.with_command(command)
    recipe.validate(command)
    try:
        return COMMAND_TABLE[command](recipe, out, threads)
    except KeyError as e:
        raise RecipeError([f"missing key {e.args[0]!r} for {command}"]) from None


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--recipe", help="INI recipe file")
    src.add_argument("--preset", help="named recipe shipped with the package")
    common.add_argument("--out", default=".", help="output directory (created if missing)")
    common.add_argument("--format", action="append", choices=("csv", "json", "svg"), dest="formats",
                        help="output format, repeatable; overrides the recipe")
    common.add_argument("--threads", type=int, default=None, help="worker threads (default: $GAUGELAT_THREADS or 1)")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="gaugelat", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"gaugelat {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=(COMMAND_TABLE[name].__doc__ or "").strip().splitlines()[0])
    sub.add_parser("run", parents=[common], help="run whatever command the recipe names")
    sub.add_parser("presets", help="list shipped presets")
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "presets":
        for name in list_presets():
            print(name)
        return 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.recipe:
            recipe = load_recipe(args.recipe)
        elif args.preset:
            recipe = load_preset(args.preset)
        else:
            raise RecipeError(["--recipe or --preset is required"])
        if args.formats:
            secs = {k: dict(v) for k, v in recipe.sections.items()}
            secs.setdefault("output", {})["formats"] = ", ".join(dict.fromkeys(args.formats))
            recipe = RunRecipe(secs, recipe.name)
        command = recipe.command if args.command == "run" else args.command
        threads = resolve_threads(args.threads)
        files = run_recipe(recipe, args.out, command, threads)
    except RecipeError as e:
        print(f"gaugelat: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        where = f" {e.filename}" if e.filename else ""
        print(f"gaugelat: I/O error{where}: {e.strerror or e}", file=sys.stderr)
        return 3
    except (GaugelatError, ValueError) as e:
        print(f"gaugelat: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    for f in files:
        log.info("wrote %s", f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
