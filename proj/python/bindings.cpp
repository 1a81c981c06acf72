#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include <random>
#include <sstream>

#include "planar_homotopy/characterize.hpp"
#include "planar_homotopy/cli.hpp"
#include "planar_homotopy/quotient.hpp"
#include "planar_homotopy/raster.hpp"
#include "planar_homotopy/retractor.hpp"
#include "planar_homotopy/scenes.hpp"
#include "planar_homotopy/tiler.hpp"

namespace py = pybind11;
using namespace ph;

namespace {

using XY = std::pair<int, int>;

std::vector<XY> xy(const std::vector<Cell>& cells) {
  std::vector<XY> out;
  out.reserve(cells.size());
  for (Cell c : cells) out.emplace_back(c.x, c.y);
  return out;
}

std::vector<Cell> cells(const std::vector<XY>& pts) {
  std::vector<Cell> out;
  out.reserve(pts.size());
  for (auto [x, y] : pts) out.push_back({x, y});
  return out;
}

Adjacency adjacency(int a) {
  if (a == 4) return Adjacency::Four;
  if (a == 8) return Adjacency::Eight;
  throw py::value_error("adjacency must be 4 or 8");
}

py::dict lamination_dict(const Lamination& l) {
  py::dict d;
  d["constant"] = l.constant;
  d["noncrossing"] = l.noncrossing;
  d["filling"] = l.filling;
  d["samples"] = l.samples;
  d["vertex_classes"] = l.vertex_classes;
  std::vector<XY> bands;
  for (auto& b : l.bands) bands.emplace_back(b.i, b.j);
  d["bands"] = bands;
  d["witness"] = l.witness;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Raster-scale tools for homotopically 1-dimensional planar sets";

  py::class_<Raster>(m, "Raster")
      .def(py::init<int, bool>(), py::arg("k"), py::arg("includes_infinity") = false)
      .def_static("from_rows", &raster_from_rows, py::arg("rows"), py::arg("includes_infinity") = false)
      .def_static("from_string", &raster_from_string)
      .def("to_string", [](const Raster& r) { return to_string(r); })
      .def_property_readonly("resolution", &Raster::resolution)
      .def_property_readonly("side", &Raster::side)
      .def_property("includes_infinity", &Raster::includes_infinity, &Raster::set_includes_infinity)
      .def("count", &Raster::count)
      .def("get", &Raster::get)
      .def("set", [](Raster& r, int x, int y, bool v) {
        if (!r.in_bounds(x, y)) throw py::index_error("cell out of bounds");
        r.set(x, y, v);
      }, py::arg("x"), py::arg("y"), py::arg("value") = true)
      .def("cells", [](const Raster& r) { return xy(occupied_cells(r)); })
      .def(py::self == py::self)
      .def("__repr__", [](const Raster& r) {
        return "<Raster k=" + std::to_string(r.resolution()) + " cells=" + std::to_string(r.count()) + ">";
      });

  m.def("label_components", [](const Raster& r, int adj) {
    std::vector<py::dict> out;
    for (auto& c : label_components(r, adjacency(adj)).members) {
      py::dict d;
      d["cells"] = xy(c.cells);
      d["has_infinity"] = c.has_infinity;
      d["diameter"] = c.diameter;
      out.push_back(d);
    }
    return out;
  }, py::arg("raster"), py::arg("adjacency") = 4);
  m.def("find_2x2_block", [](const Raster& r) -> std::optional<XY> {
    auto b = find_2x2_block(r);
    if (!b) return std::nullopt;
    return XY{b->x, b->y};
  });
  m.def("sierpinski_carpet", &sierpinski_carpet, py::arg("depth"), py::arg("k"));

  py::class_<Scene>(m, "Scene")
      .def_readonly("id", &Scene::id)
      .def_readonly("ladder", &Scene::ladder)
      .def_property_readonly("puncture_count", [](const Scene& s) { return s.punctures.size(); })
      .def_property_readonly("has_infinity", &Scene::has_infinity)
      .def("bad_at", &Scene::bad_at, py::arg("k"))
      .def("continuum", [](const Scene& s, int k) { return peano_continuum_from_scene(s, k); }, py::arg("k"))
      .def("to_string", [](const Scene& s) {
        std::ostringstream os;
        write_scene(os, s);
        return os.str();
      })
      .def_static("from_string", [](const std::string& text) {
        std::istringstream is(text);
        return read_scene(is);
      })
      .def("__repr__", [](const Scene& s) { return "<Scene " + s.id + ">"; });

  m.def("builtin_scene", py::overload_cast<std::string_view, int, int>(&builtin_scene), py::arg("name"), py::arg("depth"), py::arg("k"));
  m.def("validate_scene", [](const Scene& s) {
    auto rec = validate_scene(s);
    py::dict checks;
    for (auto& c : rec.checks) checks[py::str(c.name)] = c.passed;
    return py::make_tuple(rec.passed(), checks);
  });

  m.def("homotopy_dimension_verdict", [](const Scene& s, const std::string& schedule) {
    auto v = homotopy_dimension_verdict(s, schedule.empty() ? std::vector<Dyadic>{} : parse_schedule(schedule));
    py::dict d;
    d["verdict"] = to_string(v.verdict);
    d["condition1"] = to_string(v.cond1.verdict);
    d["condition2"] = to_string(v.cond2.verdict);
    d["report"] = format_report(v);
    return d;
  }, py::arg("scene"), py::arg("schedule") = "");

  m.def("run_stages", [](const Scene& s, int stages) {
    PeanoTiling t;
    {
      py::gil_scoped_release release;
      t = run_stages(s, stages);
    }
    auto spine_report = spine_union_dimension_check(t, s);
    std::ostringstream file;
    write_tiling(file, t);
    py::dict d;
    d["passed"] = t.passed();
    d["domains"] = t.domains.size();
    d["stages"] = t.stages.size();
    std::vector<double> coverage;
    for (auto& st : t.stages) coverage.push_back(st.coverage);
    d["coverage"] = coverage;
    d["spine_union_passed"] = spine_report.passed;
    d["report"] = format_claims(t);
    d["tiling"] = file.str();
    return d;
  }, py::arg("scene"), py::arg("stages"));

  m.def("build_spine", [](const Raster& u, const std::vector<XY>& punctures, bool root_at_infinity) {
    auto s = build_spine(u, cells(punctures), root_at_infinity);
    py::dict d;
    d["skeleton"] = s.skeleton;
    d["regions"] = s.regions.size();
    d["bijective"] = s.bijective();
    d["thin"] = !find_2x2_block(s.skeleton).has_value();
    d["arcs"] = s.arcs.size();
    return d;
  }, py::arg("domain"), py::arg("punctures"), py::arg("root_at_infinity") = false);

  m.def("run_graph", [](const Raster& r) {
    auto g = build_run_graph(r);
    return py::make_tuple(g.runs.size(), g.edges.size());
  });
  m.def("injectivity_probe", [](const Raster& r, const std::vector<XY>& loop) {
    auto rec = injectivity_probe(r, cells(loop));
    py::dict d;
    d["word_m"] = rec.word_m.letters;
    d["word_quotient"] = rec.word_quotient.letters;
    d["consistent"] = rec.consistent;
    return d;
  });
  m.def("random_loop", [](const Raster& r, std::uint64_t seed, int steps) {
    std::mt19937_64 rng(seed);
    return xy(random_loop(r, rng, steps));
  }, py::arg("raster"), py::arg("seed"), py::arg("steps"));
  m.def("word_string", &word_string);

  m.def("ideal_triangulation", [](const std::vector<std::pair<std::int64_t, std::int64_t>>& pts) {
    std::vector<CirclePoint> h;
    for (auto [p, q] : pts) h.push_back({p, q});
    auto t = ideal_triangulation(h);
    auto chk = verify_triangulation(t);
    py::dict d;
    d["triangles"] = t.triangles;
    d["ok"] = chk.ok();
    d["witness"] = chk.witness;
    return d;
  });
  m.def("cancellation_lamination", [](const std::vector<int>& word, int grid) { return lamination_dict(cancellation_lamination(word, grid)); },
        py::arg("word"), py::arg("grid") = 64);

  m.def("cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = cli::run(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  }, "run the planar-homotopy command line in-process; returns (exit code, stdout, stderr)");
}
