#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "skintone/colorimetry.hpp"
#include "skintone/config.hpp"
#include "skintone/error.hpp"
#include "skintone/extraction.hpp"
#include "skintone/fixtures.hpp"
#include "skintone/manifest.hpp"
#include "skintone/records.hpp"
#include "skintone/report.hpp"
#include "skintone/run.hpp"
#include "skintone/stats.hpp"

namespace py = pybind11;
using namespace skintone;

namespace {

py::tuple lab_tuple(const LabColor& c) { return py::make_tuple(c.L, c.a, c.b); }
py::tuple rgb_tuple(const SrgbColor& c) { return py::make_tuple(c.r, c.g, c.b); }

py::dict estimate_dict(const SkinEstimate& e) {
    py::dict d;
    d["method"] = std::string(to_string(e.method));
    d["srgb"] = rgb_tuple(e.mean);
    d["lab"] = lab_tuple(e.lab);
    d["ita"] = e.ita;
    d["ita_class"] = std::string(to_string(e.ita_class));
    d["samples"] = e.samples;
    d["fallback_mask"] = e.fallback_mask;
    return d;
}

Method method_arg(const std::string& name) {
    const auto m = parse_method(name);
    if (!m) throw py::value_error("unknown method '" + name + "'");
    return *m;
}

}  // namespace

PYBIND11_MODULE(_skintone, m) {
    m.doc() = "Skin tone extraction, recoloring, relighting and evaluation";
    m.attr("__version__") = "1.0.0";

    static py::exception<Error> error(m, "SkintoneError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(error, e.what());
        }
    });

    m.def("srgb_to_lab", [](double r, double g, double b) { return lab_tuple(srgb_to_lab({r, g, b})); },
          py::arg("r"), py::arg("g"), py::arg("b"));
    m.def("lab_to_srgb", [](double L, double a, double b) {
        const auto c = lab_to_srgb({L, a, b});
        return py::make_tuple(rgb_tuple(c.color), c.gamut_clipped);
    }, py::arg("L"), py::arg("a"), py::arg("b"), "Returns ((r, g, b), gamut_clipped).");
    m.def("delta_e", [](std::array<double, 3> x, std::array<double, 3> y) {
        return delta_e({x[0], x[1], x[2]}, {y[0], y[1], y[2]});
    });
    m.def("delta_e_band", [](double de) { return std::string(to_string(delta_e_band(de))); });
    m.def("ita_degrees", [](double L, double b) { return ita_degrees({L, 0, b}); }, py::arg("L"), py::arg("b"));
    m.def("ita_class", [](double degrees) { return std::string(to_string(ita_class(degrees))); });

    m.def("cheek_rois", [](int x, int y, int w, int h, int image_width, int image_height) {
        const auto [l, r] = cheek_rois({x, y, w, h}, image_width, image_height);
        return py::make_tuple(py::make_tuple(l.x, l.y, l.w, l.h), py::make_tuple(r.x, r.y, r.w, r.h));
    }, py::arg("x"), py::arg("y"), py::arg("w"), py::arg("h"), py::arg("image_width"), py::arg("image_height"));

    m.def("extract", [](const std::string& photo, const std::string& method, std::optional<std::string> albedo,
                        std::optional<std::string> landmarks, std::optional<std::array<int, 4>> face, std::uint64_t seed) {
        ExtractionInput input;
        input.photo = read_image(photo);
        if (albedo) input.albedo = read_image(*albedo);
        if (landmarks) input.landmarks = read_landmarks(*landmarks);
        if (face) input.face = FaceBox{(*face)[0], (*face)[1], (*face)[2], (*face)[3]};
        ExtractParams params;
        params.mmm.seed = seed;
        SkinEstimate e;
        {
            py::gil_scoped_release release;
            e = extract(input, method_arg(method), params);
        }
        return estimate_dict(e);
    }, py::arg("photo"), py::arg("method") = "MMM", py::arg("albedo") = py::none(), py::arg("landmarks") = py::none(),
       py::arg("face") = py::none(), py::arg("seed") = 0);

    m.def("kruskal_wallis", [](const std::vector<std::vector<double>>& groups) {
        std::vector<NamedGroup> named;
        for (std::size_t i = 0; i < groups.size(); ++i) named.push_back({"g" + std::to_string(i), groups[i]});
        const auto r = kruskal_wallis(named);
        return py::make_tuple(r.h, r.df, r.p);
    }, "Returns (H, df, p).");

    m.def("generate_fixtures", [](const std::filesystem::path& dir, int count, int size, std::uint64_t seed, bool closed_loop) {
        FixtureParams p;
        p.count = count;
        p.size = size;
        p.seed = seed;
        p.closed_loop = closed_loop;
        return generate_fixtures(dir, p).rows.size();
    }, py::arg("dir"), py::arg("count") = 12, py::arg("size") = 160, py::arg("seed") = 0, py::arg("closed_loop") = false);

    m.def("run", [](const std::filesystem::path& manifest, const std::filesystem::path& out, const std::string& config_json,
                    int jobs) {
        RunConfig config;
        if (!config_json.empty()) config = config_from_json(nlohmann::json::parse(config_json));
        config.out_dir = out;
        config.jobs = jobs;
        const Manifest rows = load_manifest(manifest);
        RunResult result;
        {
            py::gil_scoped_release release;
            result = run_pipeline(rows, config);
        }
        py::dict d;
        d["config_hash"] = result.ledger.config_hash;
        d["cells"] = result.ledger.cells.size();
        d["ok"] = result.ledger.count(CellStatus::Ok);
        d["skipped"] = result.ledger.count(CellStatus::Skipped);
        d["errors"] = result.ledger.count(CellStatus::Error);
        d["cache_hits"] = result.ledger.cache_hits();
        d["records"] = result.records.size();
        return d;
    }, py::arg("manifest"), py::arg("out"), py::arg("config_json") = "", py::arg("jobs") = 1,
       "Runs the full evaluation and writes records.csv, ledger.json and config.json into `out`.");

    m.def("report", [](const std::filesystem::path& records, const std::filesystem::path& out) {
        return write_report(read_records(records), out);
    }, py::arg("records"), py::arg("out"));
}
