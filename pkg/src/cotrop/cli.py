"""Command-line interface.

Exit codes: 0 success, 2 invalid input or usage, 3 computation error.
Diagnostics go to standard error; results go to ``--out`` or standard output.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from . import coamoeba, mirror, newton, render, sampler, tropical
from .errors import ComputationError, InvalidInput, SchemaError
from .polynomial import PolynomialOverSeries, load_polynomial, polynomial_to_dict
from .puiseux import as_fraction


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _emit_text(text: str, out) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(doc, out) -> None:
    _emit_text(json.dumps(doc, indent=2) + "\n", out)


def _load(args):
    params = {"alpha": args.alpha} if getattr(args, "alpha", None) is not None else None
    return load_polynomial(args.input, params)


def _subdivision(poly, args):
    lift = poly.lift()
    if getattr(args, "perturb", False):
        lift = newton.perturb_to_triangulation(lift, args.seed)
    return newton.lower_hull_subdivision(lift)


def _render_to(data, target, args):
    if getattr(args, "render", None):
        spec = render.RenderSpec(target, args.width, args.height, args.domains)
        _emit_text(render.render_svg(data, spec), args.render)


def _complex_for_sampling(poly, args):
    if isinstance(poly, PolynomialOverSeries):
        if args.t is None:
            raise InvalidInput("a series polynomial needs --t to be sampled")
        return sampler.specialize(poly, args.t)
    if args.t is not None:
        return sampler.ft_family(poly, args.t)
    return poly


def _sample(args):
    poly = _complex_for_sampling(_load(args), args)
    cfg = sampler.SampleConfig(
        m_count=args.samples, k_count=args.samples, raster_size=args.raster,
        seed=args.seed, threads=args.threads,
    )
    return sampler.sample_coamoeba(poly, cfg)


def _read_raster(path, args):
    with open(path, "rb") as fh:
        head = fh.read(2)
    if head == b"P5":
        return sampler.TorusRaster.load(path)
    args.input = path
    return _sample(args)


# -- subcommands ------------------------------------------------------------------------

def cmd_subdivide(args):
    sub = _subdivision(_load(args), args)
    _emit_json(newton.subdivision_to_dict(sub), args.out)
    _render_to(sub, "newton", args)


def cmd_curve(args):
    poly = _load(args)
    curve = tropical.corner_locus_2d(tropical.TropicalPolynomial.from_lift(_subdivision(poly, args).heights))
    _emit_json(tropical.curve_to_dict(curve), args.out)
    _render_to(curve, "tropical_curve", args)


def cmd_mirror(args):
    poly = _load(args)
    if not isinstance(poly, PolynomialOverSeries):
        raise InvalidInput("the mirror construction needs a series polynomial")
    u = as_fraction(args.u)
    deformed = mirror.deform(poly, u)
    doc = {"kind": "mirror", "u": f"{u.numerator}/{u.denominator}",
           "deformed": polynomial_to_dict(deformed),
           "mirror": polynomial_to_dict(mirror.mirror_polynomial(deformed))}
    curve = mirror.tropical_mirror(poly, u) if u <= 0 else tropical.corner_locus_2d(mirror.tropicalize(deformed))
    doc["curve"] = tropical.curve_to_dict(curve)
    _emit_json(doc, args.out)
    _render_to(curve, "tropical_curve", args)


def cmd_coamoeba(args):
    poly = _load(args)
    model = coamoeba.glue_coamoeba(poly, _subdivision(poly, args))
    _emit_json(coamoeba.model_to_dict(model), args.out)
    _render_to(model, "coamoeba_model", args)


def cmd_sample(args):
    raster = _sample(args)
    if args.out:
        raster.save(args.out)
    _emit_json(raster.summary(), args.summary)
    _render_to(raster, "raster", args)


def cmd_components(args):
    raster = _read_raster(args.input, args)
    _emit_text(f"{sampler.complement_components(raster)}\n", args.out)


def cmd_hausdorff(args):
    a = _read_raster(args.input, args)
    b = _read_raster(args.against, args)
    _emit_text(f"{sampler.raster_hausdorff(a, b):.9g}\n", args.out)


def cmd_render(args):
    path = args.input
    with open(path, "rb") as fh:
        head = fh.read(2)
    if head == b"P5":
        data, target = sampler.TorusRaster.load(path), "raster"
    else:
        with open(path, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}: {exc}") from exc
        kind = doc.get("kind", "polynomial") if isinstance(doc, dict) else None
        if kind == "subdivision":
            data, target = newton.subdivision_from_dict(doc), "newton"
        elif kind == "tropical_curve":
            data, target = tropical.curve_from_dict(doc), "tropical_curve"
        elif kind == "coamoeba_model":
            data, target = coamoeba.model_from_dict(doc), "coamoeba_model"
        elif kind == "polynomial":
            poly = _load(args)
            data, target = coamoeba.glue_coamoeba(poly, _subdivision(poly, args)), "coamoeba_model"
        else:
            raise SchemaError(f"cannot render a document of kind {kind!r}")
    if args.target and args.target != target:
        raise render.TargetMismatch(f"input is a {target}, not a {args.target}")
    spec = render.RenderSpec(target, args.width, args.height, args.domains)
    _emit_text(render.render_svg(data, spec), args.out)


def cmd_localize(args):
    poly = _load(args)
    model = coamoeba.glue_coamoeba(poly, _subdivision(poly, args))
    lines = model.codual_lines if args.line is None else [model.codual_lines[args.line]]
    out = []
    for h in lines:
        comps = coamoeba.classify_localization(model, h, args.resolution)
        out.append({
            "edge": [list(h.edge[0]), list(h.edge[1])],
            "external": h.external,
            "components": [
                {"label": c.label.value, "component": c.component, "start": c.start, "end": c.end,
                 "center": list(c.center)}
                for c in comps
            ],
        })
    _emit_json({"kind": "localization", "resolution": args.resolution, "lines": out}, args.out)


# -- parser -------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cotrop", description="Tropical curves, mirrors and coamoebas of plane curves.")
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--in", dest="input", required=True, help="input file (polynomial JSON, document or PGM)")
        p.add_argument("--out", help="output file (default: standard output)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--alpha", type=float, help="value of the phase parameter named 'alpha'")
        p.add_argument("--perturb", action="store_true", help="perturb the lift to a triangulation first")
        p.add_argument("--render", help="also write an SVG figure to this file")
        p.add_argument("--domains", type=int, default=1)
        p.add_argument("--width", type=int, default=512)
        p.add_argument("--height", type=int, default=512)
        return p

    def sampling(p):
        p.add_argument("--raster", type=int, default=512, help="raster size R")
        p.add_argument("--samples", type=int, default=512, help="grid counts M = K for z")
        p.add_argument("--t", type=float, help="numeric t: specializes series, or applies the f_t family")
        return p

    common(subs.add_parser("subdivide", help="regular subdivision of the lifted support")).set_defaults(func=cmd_subdivide)
    common(subs.add_parser("curve", help="tropical curve of the polynomial")).set_defaults(func=cmd_curve)
    p = common(subs.add_parser("mirror", help="deformation f_u and its tropical mirror"))
    p.add_argument("--u", required=True, help="deformation parameter, a rational such as -1/2")
    p.set_defaults(func=cmd_mirror)
    common(subs.add_parser("coamoeba", help="glued coamoeba model")).set_defaults(func=cmd_coamoeba)
    p = sampling(common(subs.add_parser("sample", help="sampled coamoeba raster (PGM to --out)")))
    p.add_argument("--summary", help="write the JSON summary here instead of standard output")
    p.set_defaults(func=cmd_sample)
    sampling(common(subs.add_parser("components", help="count complement components"))).set_defaults(func=cmd_components)
    p = sampling(common(subs.add_parser("hausdorff", help="torus Hausdorff distance of two rasters")))
    p.add_argument("--against", required=True, help="second raster (PGM or polynomial JSON)")
    p.set_defaults(func=cmd_hausdorff)
    p = common(subs.add_parser("render", help="SVG from a document, polynomial or PGM raster"))
    p.add_argument("--target", choices=render.TARGETS)
    p.set_defaults(func=cmd_render)
    p = common(subs.add_parser("localize", help="classify codual lines of the glued model"))
    p.add_argument("--resolution", type=int, default=1024)
    p.add_argument("--line", type=int, help="index of a single codual line")
    p.set_defaults(func=cmd_localize)
    return parser


_NUMERIC_FLAGS = ("--u", "--t", "--alpha")


def _attach_negative_values(argv):
    """Rewrite ``--u -1/4`` as ``--u=-1/4``; argparse reads ``-1/4`` as a flag otherwise."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _NUMERIC_FLAGS and i + 1 < len(argv) and re.fullmatch(r"-[\d.][\d./eE+-]*", argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _attach_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except InvalidInput as exc:
        print(f"cotrop: invalid input: {exc}", file=sys.stderr)
        return 2
    except ComputationError as exc:
        print(f"cotrop: computation error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"cotrop: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, TypeError, IndexError) as exc:
        print(f"cotrop: invalid input: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
