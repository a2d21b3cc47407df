"""Runs the CLI on the bundled fixtures and validates every JSON output against docs/*.schema.json."""
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

cli, root = sys.argv[1], pathlib.Path(sys.argv[2])
schemas = {n: json.loads((root / "docs" / f"{n}.schema.json").read_text()) for n in ("map", "report", "certificate", "legend")}
out = pathlib.Path(tempfile.mkdtemp())


def run(*args):
    r = subprocess.run([cli, *args], capture_output=True, text=True)
    if r.returncode != 0:
        sys.exit(f"{args}: exit {r.returncode}: {r.stderr}")
    return r.stdout


for fixture in sorted((root / "fixtures").glob("*.json")):
    jsonschema.validate(json.loads(fixture.read_text()), schemas["map"])
    report = out / f"{fixture.stem}.report.json"
    run("analyze", str(fixture), "--report", str(report))
    jsonschema.validate(json.loads(report.read_text()), schemas["report"])
    print("ok", fixture.stem)

cert = json.loads(run("certify-ramification", str(root / "fixtures/f.json"), "--point", "2,3,5", "--depth", "2"))
jsonschema.validate(cert, schemas["certificate"])
report = out / "f.point.json"
run("analyze", str(root / "fixtures/f.json"), "--point", "2,3,5", "--depth", "2", "--report", str(report))
jsonschema.validate(json.loads(report.read_text()), schemas["report"])
legend = json.loads(run("render", str(root / "fixtures/power.json"), "--res", "16x16", "--out", str(out / "p.ppm")))
jsonschema.validate(legend, schemas["legend"])
print("all outputs match their schemas")
