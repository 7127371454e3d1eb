"""End-to-end run from JSON inputs to CSV outputs, in-process.

Equivalent to:

    slicecut simulate --tool demos/data/tool.json --stock demos/data/stock.json \
        --toolpath demos/data/toolpath.json --dz 1.0 --out demos/output

Run: python demos/05_full_simulation.py
"""

from pathlib import Path

from slicecut import SimulationConfig, load_stock, load_tool, load_toolpath
from slicecut.pipeline import run_simulation, write_outputs

data = Path(__file__).parent / "data"
tool = load_tool(data / "tool.json")
stock = load_stock(data / "stock.json")
toolpath = load_toolpath(data / "toolpath.json")

config = SimulationConfig(dz=1.0, out_dir=Path(__file__).parent / "output")
result = run_simulation(config, tool, stock, toolpath)
write_outputs(result, config)

perf = result.perf
print(f"operation           {perf.operation}")
print(f"scheduled CLs       {perf.n_cls_scheduled}")
print(f"processed segments  {perf.n_cls_processed}")
print(f"total time          {perf.total_time_s:.3f} s")
print(f"avg per processed   {perf.avg_time_per_processed_cl_ms:.2f} ms")

removed = sum(r.removed_volume for r in result.records)
v_final = result.final_stack.volume()
print(f"\nremoved volume      {removed:.2f} mm^3")
print(f"final stock volume  {v_final:.2f} mm^3")
print(f"conservation check  {removed + v_final:.2f} mm^3 (initial was 200000.00)")

engaged = [r for r in result.records if r.n_slices_engaged]
widest = max(engaged, key=lambda r: max(iv.width for s in r.slices for iv in s.intervals))
w = max(iv.width for s in widest.slices for iv in s.intervals)
print(f"\nwidest engagement   {w:.2f} deg at CL {widest.cl_index}")
print(f"outputs under       {config.out_dir}")
