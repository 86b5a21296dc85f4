#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <set>
#include <sstream>

#include "sigfuzz/campaign.hpp"
#include "sigfuzz/constants.hpp"
#include "sigfuzz/nwise.hpp"
#include "sigfuzz/report.hpp"

namespace py = pybind11;
using namespace sigfuzz;

namespace {

// Parsed + instrumented model with a reusable executor behind it.
class PyModel {
 public:
  explicit PyModel(const std::string& text) {
    ParseResult pr = parse_model(text);
    if (!pr.ok()) {
      std::string msg;
      for (const auto& d : pr.diagnostics) msg += d.to_string() + "\n";
      throw py::value_error(msg);
    }
    model_ = std::move(*pr.model);
    InstrumentResult ir = instrument(model_);
    if (!ir.ok()) {
      std::string msg;
      for (const auto& d : ir.diagnostics) msg += d.to_string() + "\n";
      throw py::value_error(msg);
    }
    im_ = std::make_unique<InstrumentedModel>(std::move(*ir.model));
    layout_ = layout_test_buffer(model_);
    executor_ = std::make_unique<Executor>(*im_);
  }

  std::string name() const { return model_.name; }
  int sample_count() const { return model_.sample_count; }
  size_t buffer_size() const { return layout_.total_bytes; }
  std::string text() const { return print_model(model_); }

  py::list layout() const {
    py::list out;
    for (const auto& e : layout_.entries) {
      py::dict d;
      d["port"] = e.port_id;
      d["offset"] = e.offset;
      d["bytes_per_elem"] = e.bytes_per_elem;
      d["elem_count"] = e.elem_count;
      d["type"] = type_name(e.value_type);
      d["width"] = e.width;
      out.append(d);
    }
    return out;
  }

  py::list decisions() const {
    py::list out;
    for (const auto& d : im_->decisions) {
      py::dict jd;
      jd["id"] = d.id;
      jd["block"] = d.block_id;
      jd["label"] = d.label;
      jd["conditions"] = d.condition_count;
      out.append(jd);
    }
    return out;
  }

  py::dict mine() const {
    ConstantDictionary dict = mine_constants(model_);
    py::dict out;
    for (ValueType t : {ValueType::I8, ValueType::I16, ValueType::I32}) {
      py::list vals;
      for (int64_t v : dict.ints(t)) vals.append(v);
      out[type_name(t)] = vals;
    }
    py::list fl;
    for (double v : dict.floats()) fl.append(v);
    out["float64"] = fl;
    return out;
  }

  py::dict execute(py::bytes data, bool capture_states) {
    std::string raw = data;
    TestCase tc;
    tc.bytes.assign(raw.begin(), raw.end());
    if (tc.bytes.size() != layout_.total_bytes)
      throw py::value_error("buffer must be " + std::to_string(layout_.total_bytes) + " bytes");
    const auto& trace = executor_->run(tc, capture_states);

    py::dict out;
    py::dict outputs;
    auto outs = model_.output_port_indices();
    for (size_t oi = 0; oi < outs.size(); ++oi) {
      const auto& port = model_.ports[outs[oi]];
      py::list vals;
      for (const auto& v : trace.outputs[oi]) {
        if (v.type == ValueType::Bool)
          vals.append(v.i != 0);
        else if (v.type == ValueType::F64)
          vals.append(v.f);
        else
          vals.append(v.i);
      }
      outputs[port.id.c_str()] = vals;
    }
    out["outputs"] = outputs;
    out["steps"] = trace.steps_executed;
    if (trace.fault) {
      py::dict f;
      f["kind"] = fault_name(trace.fault->kind);
      f["step"] = trace.fault->step;
      out["fault"] = f;
    } else {
      out["fault"] = py::none();
    }
    py::list covered;
    for (size_t d = 0; d < trace.evaluations.size(); ++d) {
      const auto& info = im_->decisions[d];
      std::set<std::tuple<int, int, bool>> triples;
      for (const auto& ev : trace.evaluations[d]) {
        triples.insert({static_cast<int>(d), 0, (ev.word & 1) != 0});
        if (!info.single())
          for (int c = 1; c <= info.condition_count; ++c)
            if (ev.mask >> c & 1) triples.insert({static_cast<int>(d), c, (ev.word >> c & 1) != 0});
      }
      for (const auto& [dd, cc, oo] : triples) covered.append(py::make_tuple(dd, cc, oo));
    }
    out["coverage"] = covered;
    out["signature"] = signature(trace, *im_).hex();
    return out;
  }

  const InstrumentedModel& im() const { return *im_; }

 private:
  ModelIR model_;
  std::unique_ptr<InstrumentedModel> im_;
  BufferLayout layout_;
  std::unique_ptr<Executor> executor_;
};

py::dict campaign_to_dict(const InstrumentedModel& im, const CampaignResult& r) {
  py::dict out;
  auto metrics = [](const CoverageMetrics& m) {
    py::dict d;
    d["unit_pct"] = m.unit_pct;
    d["cond_dec_pct"] = m.cond_dec_pct;
    d["mcdc_pct"] = m.mcdc_pct;
    return d;
  };
  out["model"] = im.base.name;
  out["seed_metrics"] = metrics(r.seed_metrics);
  out["final_metrics"] = metrics(r.final_metrics);
  out["executions"] = r.executions;
  out["pool_size"] = r.pool_size;
  out["accepted"] = r.accepted;
  out["rejected"] = r.rejected;
  out["findings"] = r.findings.size();
  py::list series;
  for (const auto& row : r.series)
    series.append(py::make_tuple(row.elapsed, row.executions, row.unit_pct, row.cond_dec_pct,
                                 row.mcdc_pct));
  out["series"] = series;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "coverage-guided model fuzzing with signal-pattern mutations";

  py::class_<PyModel>(m, "Model")
      .def(py::init<const std::string&>(), py::arg("text"))
      .def_property_readonly("name", &PyModel::name)
      .def_property_readonly("sample_count", &PyModel::sample_count)
      .def_property_readonly("buffer_size", &PyModel::buffer_size)
      .def("text", &PyModel::text)
      .def("layout", &PyModel::layout)
      .def("decisions", &PyModel::decisions)
      .def("mine_constants", &PyModel::mine)
      .def("execute", &PyModel::execute, py::arg("data"), py::arg("capture_states") = false);

  m.def(
      "fast_nwise",
      [](int n, const std::vector<std::vector<double>>& ports, uint64_t seed) {
        return fast_nwise(n, ports, seed).cases;
      },
      py::arg("n"), py::arg("ports"), py::arg("seed") = 1,
      "n-wise value combinations over candidate sets");

  m.def(
      "record",
      [](bool res, int cond_index, uint64_t word) {
        CoverageVector v{word};
        record(res, cond_index, v);
        return py::make_tuple(res, v.word);
      },
      py::arg("res"), py::arg("cond_index"), py::arg("word") = 0);
  m.def("dec_flipped",
        [](uint64_t a, uint64_t b) { return dec_flipped(CoverageVector{a}, CoverageVector{b}); });
  m.def("cond_flipped", [](uint64_t a, uint64_t b, int c) {
    return cond_flipped(CoverageVector{a}, CoverageVector{b}, c);
  });

  m.def(
      "run_campaign",
      [](const std::string& text, double budget, uint64_t exec_budget, uint64_t seed, int workers,
         bool signal_mutations, bool bmc_seeds, int nwise, int unroll,
         const std::string& report_dir) {
        PyModel model(text);
        CampaignConfig cfg;
        cfg.budget_seconds = budget;
        cfg.exec_budget = exec_budget;
        cfg.seed = seed;
        cfg.workers = workers;
        cfg.signal_mutations = signal_mutations;
        cfg.bmc_seeds = bmc_seeds;
        cfg.nwise_n = nwise;
        cfg.unroll_bound = unroll;
        CampaignResult r = fuzz_campaign(model.im(), cfg);
        if (!report_dir.empty()) write_campaign_report(report_dir, model.im(), r);
        return campaign_to_dict(model.im(), r);
      },
      py::arg("text"), py::arg("budget") = 0.0, py::arg("exec_budget") = 0,
      py::arg("seed") = 1, py::arg("workers") = 1, py::arg("signal_mutations") = true,
      py::arg("bmc_seeds") = true, py::arg("nwise") = 2,
      py::arg("unroll") = kDefaultUnrollBound, py::arg("report_dir") = "");

  m.attr("__version__") = "0.1.0";
}
