"""Run configuration and the flat ``key=value`` config-file format."""

from dataclasses import asdict, dataclass, fields, replace

CASES = ("mms", "hemo", "verify")
ELEMENTS = ("taylor_hood_p2", "mini_p1")
METHODS = ("sp", "robin_gmres", "robin_swr")


@dataclass(frozen=True)
class RunConfig:
    """Parameters of one run.

    ``h`` is the mesh size of the manufactured case and the vertical mesh
    size ``h_y`` of the hemodynamics case, whose horizontal size is ``hx``.
    """

    case: str = "mms"
    method: str = "sp"
    element: str = "taylor_hood_p2"
    h: float = 0.125
    hx: float = 0.1
    dt_f: float = 5e-5
    dt_s: float = 2.5e-5
    T: float = 0.0025
    alpha_f: float = 1.0
    alpha_s: float = 100.0
    tol: float = 1e-7
    maxit: int = 500
    output: str = "."

    def __post_init__(self):
        if self.case not in CASES:
            raise ValueError(f"case must be one of {CASES}, got {self.case!r}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.element not in ELEMENTS:
            raise ValueError(f"element must be one of {ELEMENTS}, got {self.element!r}")
        for name in ("h", "hx", "dt_f", "dt_s", "T", "tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.alpha_f < 0 or self.alpha_s < 0:
            raise ValueError("alpha_f and alpha_s must be nonnegative")
        if self.maxit < 1:
            raise ValueError("maxit must be at least 1")
        for name in ("dt_f", "dt_s"):
            n = self.T / getattr(self, name)
            if abs(n - round(n)) > 1e-8 * max(n, 1.0):
                raise ValueError(f"{name}={getattr(self, name)} does not divide T={self.T}")

    def with_(self, **kw):
        return replace(self, **kw)

    def as_dict(self):
        return asdict(self)


def _convert(field_type, text):
    if field_type in (float, "float"):
        return float(text)
    if field_type in (int, "int"):
        return int(text)
    return text


def parse_config_text(text):
    """Parse ``key=value`` lines (``#`` comments allowed) into a dict of
    typed values. Unknown keys are rejected."""
    types = {f.name: f.type for f in fields(RunConfig)}
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in types:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        out[key] = _convert(types[key], value)
    return out


def load_config(path, **overrides):
    with open(path) as fh:
        values = parse_config_text(fh.read())
    values.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**values)
