"""Validates shipped problems and fresh CLI results against the JSON schemas."""
import glob
import json
import os
import subprocess
import sys
import tempfile

try:
    import jsonschema
    from referencing import Registry, Resource
except ImportError:
    print("jsonschema not available")
    sys.exit(77)

hlpv, root = sys.argv[1], sys.argv[2]


def load(path):
    with open(path) as f:
        return json.load(f)


problem = load(os.path.join(root, "schemas", "problem.schema.json"))
result = load(os.path.join(root, "schemas", "result.schema.json"))
registry = Registry().with_resources(
    [(s["$id"], Resource.from_contents(s)) for s in (problem, result)])
problem_v = jsonschema.Draft202012Validator(problem, registry=registry)
result_v = jsonschema.Draft202012Validator(result, registry=registry)

for path in sorted(glob.glob(os.path.join(root, "problems", "*.json"))):
    problem_v.validate(load(path))
    print("problem ok:", os.path.basename(path))

with tempfile.TemporaryDirectory() as tmp:
    def run(name, args, expect):
        out = os.path.join(tmp, name)
        code = subprocess.run([hlpv] + args + ["--out", out]).returncode
        if code != expect:
            sys.exit(f"{name}: exit {code}, expected {expect}")
        doc = load(out)
        result_v.validate(doc)
        status_code = {"feasible": 0, "pass": 0, "success": 0, "infeasible": 1, "fail": 1}
        if status_code.get(doc["status"], 2) != code:
            sys.exit(f"{name}: exit {code} does not match status {doc['status']}")
        print("result ok:", name)
        return out

    p = lambda n: os.path.join(root, "problems", n)
    ana = run("analyze.json", ["analyze", "--problem", p("scalar.json"), "--bisect", "0.5:2:0.05"], 0)
    run("infeasible.json", ["analyze", "--problem", p("ex1.json"), "--mode", "quadratic",
                            "--const", "rho_bar=3.9"], 1)
    ct = run("ct.json", ["synthesize", "--problem", p("ct_synthesis.json"), "--dwell", "0.05"], 0)
    run("sim.json", ["simulate", "--gain", ct, "--traj", "phase-jump", "--nu", "0.3",
                     "--horizon", "2"], 0)
    run("check.json", ["check", "--cert", ana, "--grid", "20"], 0)
print("all documents conform")
