"""Line-oriented scenario file format.

A file is a `version 1` header followed by the seven sections, in this order:

  [params]     vot / energy / outside_cost, one `key value` line each
  [nodes]      id
  [links]      id tail head kind p1 p2 p3 p4   (bpr: t0 capacity alpha beta;
                                                affine: a b 0 0)
  [providers]  id kind marginal_cost site_cost
  [stations]   id provider node d0 kappa gamma status
  [demand]     class origin dest volume
  [pricing]    p_min / p_max / grid, one `key value` line each

`#` starts a comment; blank lines are ignored; fields are whitespace
separated and numerics are plain decimal. Files that do not parse are
rejected with every offending line reported.
"""

from __future__ import annotations

from pathlib import Path

from .model import (
    DemandEntry,
    EconomicParams,
    InvalidScenario,
    LatencyFn,
    Link,
    Node,
    Provider,
    Scenario,
    Station,
    validate_scenario,
)

SECTIONS = ("params", "nodes", "links", "providers", "stations", "demand", "pricing")
_PARAM_KEYS = ("vot", "energy", "outside_cost")
_PRICING_KEYS = ("p_min", "p_max", "grid")


class ScenarioParseError(ValueError):
    """Carries every located parse or validation error for a scenario file."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))


class _Parser:
    def __init__(self, name: str):
        self.name = name
        self.errors: list[str] = []
        self.nodes: list[Node] = []
        self.links: list[Link] = []
        self.providers: list[Provider] = []
        self.stations: list[Station] = []
        self.demand: list[DemandEntry] = []
        self.params: dict = {}
        self.pricing: dict = {}
        self.version: int | None = None

    def error(self, lineno: int, message: str):
        self.errors.append(f"{self.name}:{lineno}: {message}")

    def _num(self, tok: str, lineno: int, what: str) -> float | None:
        try:
            return float(tok)
        except ValueError:
            self.error(lineno, f"{what}: not a number '{tok}'")
            return None

    def _int(self, tok: str, lineno: int, what: str) -> int | None:
        try:
            return int(tok)
        except ValueError:
            self.error(lineno, f"{what}: not an integer '{tok}'")
            return None

    def _arity(self, fields: list[str], n: int, lineno: int, what: str) -> bool:
        if len(fields) != n:
            self.error(lineno, f"{what}: expected {n} fields, got {len(fields)}")
            return False
        return True

    def _keyval(self, fields, lineno, section, keys, store, as_int=()):
        if not self._arity(fields, 2, lineno, f"[{section}] line"):
            return
        key, raw = fields
        if key not in keys:
            self.error(lineno, f"[{section}]: unknown key '{key}'")
            return
        if key in store:
            self.error(lineno, f"[{section}]: duplicate key '{key}'")
            return
        value = (self._int if key in as_int else self._num)(raw, lineno, f"[{section}] {key}")
        if value is not None:
            store[key] = value

    def feed(self, lineno: int, section: str, fields: list[str]):
        if section == "params":
            self._keyval(fields, lineno, "params", _PARAM_KEYS, self.params)
        elif section == "pricing":
            self._keyval(fields, lineno, "pricing", _PRICING_KEYS, self.pricing,
                         as_int=("grid",))
        elif section == "nodes":
            if self._arity(fields, 1, lineno, "node line"):
                nid = self._int(fields[0], lineno, "node id")
                if nid is not None:
                    self.nodes.append(Node(nid))
        elif section == "links":
            if not self._arity(fields, 8, lineno, "link line"):
                return
            lid = self._int(fields[0], lineno, "link id")
            tail = self._int(fields[1], lineno, "link tail")
            head = self._int(fields[2], lineno, "link head")
            kind = fields[3]
            ps = [self._num(tok, lineno, f"link parameter {i + 1}")
                  for i, tok in enumerate(fields[4:8])]
            if None in (lid, tail, head) or None in ps:
                return
            if kind == "bpr":
                latency = LatencyFn(kind="bpr", t0=ps[0], capacity=ps[1],
                                    alpha=ps[2], beta=ps[3])
            elif kind == "affine":
                latency = LatencyFn.affine(ps[0], ps[1])
            else:
                self.error(lineno, f"link {lid}: unknown latency kind '{kind}'")
                return
            self.links.append(Link(lid, tail, head, latency))
        elif section == "providers":
            if not self._arity(fields, 4, lineno, "provider line"):
                return
            pid = self._int(fields[0], lineno, "provider id")
            kind = fields[1]
            mc = self._num(fields[2], lineno, "marginal_cost")
            sc = self._num(fields[3], lineno, "site_cost")
            if None not in (pid, mc, sc):
                self.providers.append(Provider(pid, kind, mc, sc))
        elif section == "stations":
            if not self._arity(fields, 7, lineno, "station line"):
                return
            sid = self._int(fields[0], lineno, "station id")
            pid = self._int(fields[1], lineno, "station provider")
            node = self._int(fields[2], lineno, "station node")
            d0 = self._num(fields[3], lineno, "station d0")
            kappa = self._num(fields[4], lineno, "station kappa")
            gamma = self._num(fields[5], lineno, "station gamma")
            status = fields[6]
            if None not in (sid, pid, node, d0, kappa, gamma):
                self.stations.append(Station(sid, pid, node, d0, kappa, gamma, status))
        elif section == "demand":
            if not self._arity(fields, 4, lineno, "demand line"):
                return
            cls = fields[0]
            origin = self._int(fields[1], lineno, "demand origin")
            dest = self._int(fields[2], lineno, "demand dest")
            volume = self._num(fields[3], lineno, "demand volume")
            if None not in (origin, dest, volume):
                self.demand.append(DemandEntry(cls, origin, dest, volume))


def parse_scenario_text(text: str, name: str = "<scenario>") -> Scenario:
    """Parse and validate scenario text; raises ScenarioParseError with every
    located violation on failure.
    """
    p = _Parser(name)
    section: str | None = None
    seen: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if p.version is None:
            if fields[0] != "version" or len(fields) != 2:
                p.error(lineno, "expected 'version 1' header")
                p.version = -1
            else:
                v = p._int(fields[1], lineno, "version")
                p.version = v if v is not None else -1
                if v is not None and v != 1:
                    p.error(lineno, f"unsupported version {v}")
            continue
        if fields[0].startswith("["):
            header = line
            if not (header.startswith("[") and header.endswith("]")):
                p.error(lineno, f"malformed section header '{header}'")
                continue
            name_ = header[1:-1]
            if name_ not in SECTIONS:
                p.error(lineno, f"unknown section [{name_}]")
                section = None
                continue
            expected = SECTIONS[len(seen)] if len(seen) < len(SECTIONS) else None
            if name_ in seen:
                p.error(lineno, f"duplicate section [{name_}]")
            elif name_ != expected:
                p.error(lineno, f"expected section [{expected}], found [{name_}]")
                seen.append(name_)
            else:
                seen.append(name_)
            section = name_
            continue
        if section is None:
            p.error(lineno, f"content before any section: '{line}'")
            continue
        p.feed(lineno, section, fields)

    if p.version is None:
        p.error(1, "empty scenario: missing 'version 1' header")
    for missing in [s for s in SECTIONS if s not in seen]:
        p.error(0, f"missing section [{missing}]")
    for key in _PARAM_KEYS:
        if "params" in seen and key not in p.params:
            p.error(0, f"[params]: missing key '{key}'")
    for key in _PRICING_KEYS:
        if "pricing" in seen and key not in p.pricing:
            p.error(0, f"[pricing]: missing key '{key}'")
    if p.errors:
        raise ScenarioParseError(p.errors)

    params = EconomicParams(
        vot=p.params["vot"], energy=p.params["energy"],
        outside_cost=p.params["outside_cost"],
        p_min=p.pricing["p_min"], p_max=p.pricing["p_max"],
        grid=p.pricing["grid"],
    )
    scenario = Scenario(
        nodes=tuple(p.nodes), links=tuple(p.links), stations=tuple(p.stations),
        providers=tuple(p.providers), demand=tuple(p.demand), params=params,
        version=p.version,
    )
    try:
        return validate_scenario(scenario)
    except InvalidScenario as exc:
        raise ScenarioParseError([f"{name}: {e}" for e in exc.errors]) from exc


def parse_scenario(path) -> Scenario:
    """Read, parse, and validate a scenario file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioParseError([f"{path}: cannot read: {exc.strerror or exc}"]) from exc
    return parse_scenario_text(text, name=str(path))
