"""CSV output. Floats are written with 6 significant digits."""

import csv
import os

DISPLACEMENT_FIELDS = ("t", "x1_disp", "x2_disp", "x3_disp")
RESIDUAL_FIELDS = ("run", "iteration", "residual")


def fmt(v):
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return f"{v:.5e}"
    return str(v)


def write_csv(path, header, rows):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(x) for x in r])


def write_errors(path, reports):
    from .cases import ErrorReport

    write_csv(path, ErrorReport.CSV_FIELDS, [[r.row()[k] for k in ErrorReport.CSV_FIELDS] for r in reports])


def write_residuals(path, reports):
    rows = []
    for run, r in enumerate(reports):
        rows += [[run, k, float(v)] for k, v in enumerate(r.residuals)]
    write_csv(path, RESIDUAL_FIELDS, rows)


def write_displacement(path, times, disp):
    write_csv(path, DISPLACEMENT_FIELDS, [[float(t), *map(float, d)] for t, d in zip(times, disp)])


def write_config(path, config):
    with open(path, "w") as fh:
        for k, v in config.as_dict().items():
            fh.write(f"{k}={v}\n")
