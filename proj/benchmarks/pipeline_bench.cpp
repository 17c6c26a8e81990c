#include <benchmark/benchmark.h>

#include "slicekit/gcode.hpp"
#include "slicekit/mesh_io.hpp"
#include "slicekit/primitives.hpp"
#include "slicekit/slicer.hpp"
#include "slicekit/toolpath.hpp"

using namespace slicekit;

namespace {

const MachineProfile kMachine{};

TriangleMesh sphere(int subdivisions) { return normalize_placement(make_icosphere(20.0, subdivisions), kMachine); }

void BM_SliceSphere(benchmark::State& state) {
    const TriangleMesh mesh = sphere(static_cast<int>(state.range(0)));
    const PrintProfile profile{};
    for (auto _ : state) {
        LayerStack stack = slice_all(mesh, profile, kMachine, 1);
        benchmark::DoNotOptimize(stack);
    }
    state.counters["triangles"] = static_cast<double>(mesh.triangles.size());
}
BENCHMARK(BM_SliceSphere)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_SliceThreads(benchmark::State& state) {
    const TriangleMesh mesh = sphere(6);
    const PrintProfile profile{};
    for (auto _ : state) {
        LayerStack stack = slice_all(mesh, profile, kMachine, static_cast<unsigned>(state.range(0)));
        benchmark::DoNotOptimize(stack);
    }
}
BENCHMARK(BM_SliceThreads)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_PlanPrint(benchmark::State& state) {
    PrintProfile profile{};
    profile.infill_percent = static_cast<double>(state.range(0));
    const LayerStack stack = slice_all(sphere(4), profile, kMachine, 1);
    for (auto _ : state) {
        ToolpathPlan plan = plan_print(stack, profile, kMachine, 1);
        benchmark::DoNotOptimize(plan);
    }
}
BENCHMARK(BM_PlanPrint)->Arg(10)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

struct Emitted {
    PrintProfile profile{};
    std::string text;

    Emitted() {
        const ToolpathPlan plan = plan_print(slice_all(sphere(4), profile, kMachine, 1), profile, kMachine, 1);
        text = format_program(emit(plan, profile, kMachine));
    }
};

const Emitted& emitted() {
    static const Emitted e;
    return e;
}

void BM_ParseGcode(benchmark::State& state) {
    const std::string& text = emitted().text;
    for (auto _ : state) {
        GCodeProgram p = parse_gcode(text);
        benchmark::DoNotOptimize(p);
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseGcode)->Unit(benchmark::kMillisecond);

void BM_Lint(benchmark::State& state) {
    const GCodeProgram program = parse_gcode(emitted().text);
    for (auto _ : state) {
        auto diags = lint(program, emitted().profile, kMachine);
        benchmark::DoNotOptimize(diags);
    }
    state.counters["commands"] = static_cast<double>(program.commands.size());
}
BENCHMARK(BM_Lint)->Unit(benchmark::kMillisecond);

void BM_ParseBinaryStl(benchmark::State& state) {
    const std::vector<std::uint8_t> bytes = write_binary_stl(make_icosphere(20.0, 6));
    for (auto _ : state) {
        TriangleMesh mesh = parse_stl(bytes);
        benchmark::DoNotOptimize(mesh);
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * bytes.size()));
}
BENCHMARK(BM_ParseBinaryStl)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
