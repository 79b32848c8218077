"""Problem files: INI-style sections read with configparser."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import ParseError, ProblemFileError
from .expr import free_symbols, parse_expr
from .reduction import WaveFrame

PIPELINE_STEPS = ("integrate_once", "reduce_order")
DEFAULT_OPTIONS = {"max_pairs": 10_000, "tol": 1e-8, "seed": 20240601, "npoints": 200}


@dataclass(frozen=True)
class Options:
    max_pairs: int = DEFAULT_OPTIONS["max_pairs"]
    tol: float = DEFAULT_OPTIONS["tol"]
    seed: int = DEFAULT_OPTIONS["seed"]
    npoints: int = DEFAULT_OPTIONS["npoints"]


@dataclass(frozen=True)
class ProblemFile:
    name: str
    pde: str
    coordinates: tuple
    frame: tuple  # ((coordinate, Fraction), ...)
    dependent: str = "u"
    parameters: tuple = ()
    time: str | None = "t"
    speed: str = "v"
    pipeline: tuple = ()
    options: Options = field(default_factory=Options)
    verify: tuple = ()  # ((parameter, value text), ...)
    expected: tuple = ()  # ((case name, (constraint text, ...)), ...)

    @property
    def wave_frame(self) -> WaveFrame:
        return WaveFrame(self.frame, self.time, self.speed)

    def pde_expr(self):
        return parse_expr(self.pde)


def _names(text: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in text.split(",") if p.strip())


def _check_identifier(name: str, what: str):
    if not name.isidentifier():
        raise ProblemFileError(f"invalid {what} name {name!r}")


def parse_problem(text: str, source: str = "<problem>") -> ProblemFile:
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    cp.optionxform = str  # keep case (A0, B2, ...)
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ProblemFileError(f"{source}: {exc}") from exc
    try:
        prob = cp["problem"]
        fr = cp["frame"]
    except KeyError as exc:
        raise ProblemFileError(f"{source}: missing section [{exc.args[0]}]") from None
    allowed = {"problem", "frame", "pipeline", "options", "verify", "expected"}
    extra = set(cp.sections()) - allowed
    if extra:
        raise ProblemFileError(f"{source}: unknown section(s) {sorted(extra)}")

    def need(sec, key):
        if key not in sec or not sec[key].strip():
            raise ProblemFileError(f"{source}: [{sec.name}] needs '{key}'")
        return sec[key].strip()

    name = need(prob, "name")
    pde = need(prob, "pde")
    coordinates = _names(need(prob, "coordinates"))
    parameters = _names(prob.get("parameters", ""))
    dependent = prob.get("dependent", "u").strip()

    frame = []
    for part in need(fr, "coefficients").split(","):
        coord, sep, k = part.partition(":")
        if not sep:
            raise ProblemFileError(f"{source}: frame coefficient {part.strip()!r} needs name:value")
        try:
            frame.append((coord.strip(), Fraction(k.strip())))
        except (ValueError, ZeroDivisionError) as exc:
            raise ProblemFileError(f"{source}: bad frame coefficient {part.strip()!r}") from exc
    time = fr.get("time", "t").strip() or None
    speed = fr.get("speed", "v").strip()

    pipeline = _names(cp["pipeline"].get("steps", "")) if cp.has_section("pipeline") else ()
    for step in pipeline:
        if step not in PIPELINE_STEPS:
            raise ProblemFileError(f"{source}: unknown pipeline step {step!r}")

    opts = {}
    if cp.has_section("options"):
        sec = cp["options"]
        for key in sec:
            if key not in DEFAULT_OPTIONS:
                raise ProblemFileError(f"{source}: unknown option {key!r}")
            try:
                opts[key] = type(DEFAULT_OPTIONS[key])(sec[key])
            except ValueError as exc:
                raise ProblemFileError(f"{source}: bad value for option {key!r}") from exc
    verify = tuple((k, v.strip()) for k, v in cp["verify"].items()) if cp.has_section("verify") else ()
    expected = ()
    if cp.has_section("expected"):
        expected = tuple((k, tuple(c.strip() for c in v.split(",") if c.strip()))
                         for k, v in cp["expected"].items())

    pf = ProblemFile(name, pde, coordinates, tuple(frame), dependent, parameters, time, speed,
                     pipeline, Options(**opts), verify, expected)
    validate(pf, source)
    return pf


def validate(pf: ProblemFile, source: str = "<problem>"):
    for n in pf.coordinates:
        _check_identifier(n, "coordinate")
    for n in pf.parameters:
        _check_identifier(n, "parameter")
    _check_identifier(pf.dependent, "dependent variable")
    _check_identifier(pf.speed, "speed")
    names = list(pf.coordinates) + list(pf.parameters) + [pf.dependent, pf.speed]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise ProblemFileError(f"{source}: names used twice: {', '.join(dupes)}")
    frame_coords = [c for c, _ in pf.frame]
    if len(set(frame_coords)) != len(frame_coords):
        raise ProblemFileError(f"{source}: repeated frame coordinate")
    for c in frame_coords + ([pf.time] if pf.time else []):
        if c not in pf.coordinates:
            raise ProblemFileError(f"{source}: frame uses unknown coordinate {c!r}")
    if pf.time in frame_coords:
        raise ProblemFileError(f"{source}: time coordinate {pf.time!r} has a frame coefficient")
    if not any(k for _, k in pf.frame):
        raise ProblemFileError(f"{source}: all frame coefficients are zero")
    try:
        expr = pf.pde_expr()
    except ParseError as exc:
        raise ProblemFileError(f"{source}: pde: {exc}") from exc
    stray = free_symbols(expr) - set(pf.coordinates) - set(pf.parameters) - {pf.dependent}
    if stray:
        raise ProblemFileError(f"{source}: pde uses undeclared names {sorted(stray)}")
    for k, _ in pf.verify:
        if k not in pf.parameters:
            raise ProblemFileError(f"{source}: [verify] binds unknown parameter {k!r}")


def serialize_problem(pf: ProblemFile) -> str:
    lines = ["[problem]", f"name = {pf.name}", f"pde = {pf.pde}",
             f"dependent = {pf.dependent}", f"coordinates = {', '.join(pf.coordinates)}",
             f"parameters = {', '.join(pf.parameters)}", "", "[frame]",
             "coefficients = " + ", ".join(f"{c}:{k}" for c, k in pf.frame),
             f"time = {pf.time or ''}", f"speed = {pf.speed}", "", "[pipeline]",
             f"steps = {', '.join(pf.pipeline)}", "", "[options]"]
    for key in DEFAULT_OPTIONS:
        lines.append(f"{key} = {getattr(pf.options, key)!r}")
    if pf.verify:
        lines += ["", "[verify]"] + [f"{k} = {v}" for k, v in pf.verify]
    if pf.expected:
        lines += ["", "[expected]"] + [f"{k} = {', '.join(v)}" for k, v in pf.expected]
    return "\n".join(lines) + "\n"


def load_problem(path) -> ProblemFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemFileError(f"cannot read {path}: {exc}") from exc
    return parse_problem(text, str(path))
