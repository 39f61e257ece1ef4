import json

import uvicorn
from colorama import Fore
from fastapi import FastAPI
from fastapi.responses import JSONResponse

import utils
from config import API_HOST, API_PORT, MATROID_AXIOM_LIMIT
from src.errors import MatroidCutError
from src.experiment import ExperimentConfig, run_experiment
from src.gomory_hu import gomory_hu_tree
from src.instance_io import Instance
from src.matroid import check_axioms
from src.partition_algorithms import TieBreakPolicy
from src.submodular import verify_properties
from utils.console import log
from utils.schemas import dump_weight

app = FastAPI(title="MatroidCut")


def _error_response(error: MatroidCutError) -> JSONResponse:
    log("API", f"{type(error).__name__}: {error}", Fore.RED)
    status = 500 if error.exit_code == 2 else 422
    return JSONResponse(status_code=status, content={"error": type(error).__name__, "detail": str(error)})


# Solve endpoint
@app.post("/solve/")
async def solve_endpoint(request: utils.SolveRequest):
    try:
        instance = Instance.from_spec(request.instance)
        policy = TieBreakPolicy.seeded(request.seed or 0) if request.tie_break == "random" \
            else TieBreakPolicy(request.tie_break)
        report = run_experiment([instance], ExperimentConfig(request.algorithms, policy, verify=request.verify))
        report.raise_for_violations()
    except MatroidCutError as e:
        return _error_response(e)
    return JSONResponse(content=json.loads(report.to_json()))


@app.post("/gh-tree/")
async def gh_tree_endpoint(request: utils.InstanceRequest):
    try:
        instance = Instance.from_spec(request.instance)
        tree = gomory_hu_tree(instance.function)
    except MatroidCutError as e:
        return _error_response(e)
    data = tree.to_dict()
    data["edges"] = [[u, v, dump_weight(w)] for u, v, w in tree.edges]
    return JSONResponse(content=data)


@app.post("/check/")
async def check_endpoint(request: utils.InstanceRequest):
    try:
        instance = Instance.from_spec(request.instance)
        report = verify_properties(instance.function, full_pairs=request.full_pairs)
        axioms = [check_axioms(m) if m.size <= MATROID_AXIOM_LIMIT else None for m in instance.matroids]
    except MatroidCutError as e:
        return _error_response(e)
    return JSONResponse(content={"properties": report.as_dict(), "axiom_violations": axioms})


if __name__ == "__main__":
    uvicorn.run(app, host=API_HOST, port=API_PORT)
