#include "skintone/cascade.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "skintone/error.hpp"

namespace skintone {

namespace pt = boost::property_tree;

namespace {

std::vector<double> numbers(const std::string& text, const std::string& where) {
    std::vector<double> out;
    std::istringstream in(text);
    in.imbue(std::locale::classic());
    std::string token;
    while (in >> token) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(token, &used));
            if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw ParseError("cascade: non-numeric token '" + token + "' in " + where);
        }
    }
    return out;
}

const pt::ptree& child(const pt::ptree& node, const std::string& name, const std::string& where) {
    auto it = node.find(name);
    if (it == node.not_found()) throw ParseError("cascade: missing <" + name + "> in " + where);
    return it->second;
}

double number(const pt::ptree& node, const std::string& name, const std::string& where) {
    auto v = numbers(child(node, name, where).data(), where + "/" + name);
    if (v.size() != 1) throw ParseError("cascade: expected one number in " + where + "/" + name);
    return v[0];
}

int integer(const pt::ptree& node, const std::string& name, const std::string& where) {
    const double v = number(node, name, where);
    if (v != static_cast<int>(v)) throw ParseError("cascade: expected integer in " + where + "/" + name);
    return static_cast<int>(v);
}

// Children named "_" in document order.
std::vector<const pt::ptree*> items(const pt::ptree& node) {
    std::vector<const pt::ptree*> out;
    for (const auto& [key, value] : node) {
        if (key == "_") out.push_back(&value);
    }
    return out;
}

HaarRect parse_rect(const pt::ptree& node, const std::string& where) {
    const auto v = numbers(node.data(), where);
    if (v.size() != 5) throw ParseError("cascade: rect needs 'x y w h weight' in " + where);
    return {static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2]), static_cast<int>(v[3]), v[4]};
}

HaarFeature parse_feature(const pt::ptree& node, const std::string& where) {
    HaarFeature f;
    for (const auto* r : items(child(node, "rects", where))) {
        f.rects.push_back(parse_rect(*r, where + "/rects"));
    }
    if (f.rects.size() < 2 || f.rects.size() > 3) {
        throw ParseError("cascade: feature must have 2 or 3 rects in " + where);
    }
    if (auto t = node.find("tilted"); t != node.not_found()) {
        f.tilted = numbers(t->second.data(), where + "/tilted").at(0) != 0;
    }
    if (f.tilted) throw UnsupportedError("cascade: tilted Haar features are not supported (" + where + ")");
    return f;
}

void validate(const Cascade& c) {
    if (c.window_width <= 2 || c.window_height <= 2) throw ParseError("cascade: window size must exceed 2x2");
    if (c.stages.empty()) throw ParseError("cascade: no stages");
    for (std::size_t s = 0; s < c.stages.size(); ++s) {
        const auto& stage = c.stages[s];
        if (stage.classifiers.empty()) throw ParseError("cascade: stage " + std::to_string(s) + " is empty");
        for (const auto& wc : stage.classifiers) {
            if (wc.nodes.empty()) throw ParseError("cascade: weak classifier without nodes in stage " + std::to_string(s));
            for (std::size_t n = 0; n < wc.nodes.size(); ++n) {
                const auto& node = wc.nodes[n];
                if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= c.features.size()) {
                    throw ParseError("cascade: feature index " + std::to_string(node.feature) + " out of range in stage " +
                                     std::to_string(s));
                }
                for (int ch : {node.left, node.right}) {
                    const bool ok = ch > 0 ? (static_cast<std::size_t>(ch) > n && static_cast<std::size_t>(ch) < wc.nodes.size())
                                           : static_cast<std::size_t>(-ch) < wc.leaves.size();
                    if (!ok) throw ParseError("cascade: bad tree child index in stage " + std::to_string(s));
                }
            }
        }
    }
    for (const auto& f : c.features) {
        for (const auto& r : f.rects) {
            if (r.x < 0 || r.y < 0 || r.w <= 0 || r.h <= 0 || r.x + r.w > c.window_width || r.y + r.h > c.window_height) {
                throw ParseError("cascade: feature rect outside the detection window");
            }
        }
    }
}

Cascade parse_flat(const pt::ptree& root) {
    Cascade c;
    const std::string where = "cascade";
    if (auto st = root.find("stageType"); st != root.not_found() && st->second.data() != "BOOST") {
        throw UnsupportedError("cascade: stage type '" + st->second.data() + "' is not supported");
    }
    if (auto ft = root.find("featureType"); ft != root.not_found() && ft->second.data() != "HAAR") {
        throw UnsupportedError("cascade: feature type '" + ft->second.data() + "' is not supported");
    }
    c.window_width = integer(root, "width", where);
    c.window_height = integer(root, "height", where);

    const auto stage_nodes = items(child(root, "stages", where));
    if (auto sn = root.find("stageNum"); sn != root.not_found()) {
        const int declared = integer(root, "stageNum", where);
        if (declared != static_cast<int>(stage_nodes.size())) {
            throw ParseError("cascade: stageNum " + std::to_string(declared) + " but " +
                             std::to_string(stage_nodes.size()) + " stages present");
        }
    }
    for (std::size_t s = 0; s < stage_nodes.size(); ++s) {
        const std::string swhere = "stage " + std::to_string(s);
        Stage stage;
        stage.threshold = number(*stage_nodes[s], "stageThreshold", swhere);
        const auto weak_nodes = items(child(*stage_nodes[s], "weakClassifiers", swhere));
        if (auto mw = stage_nodes[s]->find("maxWeakCount"); mw != stage_nodes[s]->not_found()) {
            const int declared = integer(*stage_nodes[s], "maxWeakCount", swhere);
            if (declared != static_cast<int>(weak_nodes.size())) {
                throw ParseError("cascade: " + swhere + " declares " + std::to_string(declared) +
                                 " weak classifiers but has " + std::to_string(weak_nodes.size()));
            }
        }
        for (const auto* w : weak_nodes) {
            const auto internal = numbers(child(*w, "internalNodes", swhere).data(), swhere + "/internalNodes");
            if (internal.empty() || internal.size() % 4 != 0) {
                throw UnsupportedError("cascade: internalNodes must be 'left right feature threshold' groups (" + swhere +
                                       "); categorical splits are not supported");
            }
            WeakClassifier wc;
            for (std::size_t i = 0; i < internal.size(); i += 4) {
                wc.nodes.push_back({static_cast<int>(internal[i + 2]), internal[i + 3], static_cast<int>(internal[i]),
                                    static_cast<int>(internal[i + 1])});
            }
            wc.leaves = numbers(child(*w, "leafValues", swhere).data(), swhere + "/leafValues");
            stage.classifiers.push_back(std::move(wc));
        }
        c.stages.push_back(std::move(stage));
    }
    const auto feature_nodes = items(child(root, "features", where));
    for (std::size_t i = 0; i < feature_nodes.size(); ++i) {
        c.features.push_back(parse_feature(*feature_nodes[i], "feature " + std::to_string(i)));
    }
    return c;
}

Cascade parse_legacy(const pt::ptree& root) {
    Cascade c;
    const auto size = numbers(child(root, "size", "cascade").data(), "cascade/size");
    if (size.size() != 2) throw ParseError("cascade: <size> must hold 'width height'");
    c.window_width = static_cast<int>(size[0]);
    c.window_height = static_cast<int>(size[1]);

    const auto stage_nodes = items(child(root, "stages", "cascade"));
    for (std::size_t s = 0; s < stage_nodes.size(); ++s) {
        const std::string swhere = "stage " + std::to_string(s);
        const auto& sn = *stage_nodes[s];
        if (auto p = sn.find("parent"); p != sn.not_found()) {
            const int parent = integer(sn, "parent", swhere);
            const int next = sn.find("next") != sn.not_found() ? integer(sn, "next", swhere) : -1;
            if (parent != static_cast<int>(s) - 1 || next != -1) {
                throw UnsupportedError("cascade: tree-structured stage graphs are not supported (" + swhere + ")");
            }
        }
        Stage stage;
        stage.threshold = number(sn, "stage_threshold", swhere);
        for (const auto* tree : items(child(sn, "trees", swhere))) {
            WeakClassifier wc;
            const auto tree_nodes = items(*tree);
            for (std::size_t n = 0; n < tree_nodes.size(); ++n) {
                const auto& node = *tree_nodes[n];
                const std::string nwhere = swhere + " node " + std::to_string(n);
                TreeNode tn;
                tn.feature = static_cast<int>(c.features.size());
                c.features.push_back(parse_feature(child(node, "feature", nwhere), nwhere));
                tn.threshold = number(node, "threshold", nwhere);
                const auto branch = [&](const char* val, const char* idx) {
                    if (node.find(val) != node.not_found()) {
                        wc.leaves.push_back(number(node, val, nwhere));
                        return -static_cast<int>(wc.leaves.size() - 1);
                    }
                    const int target = integer(node, idx, nwhere);
                    if (target <= 0) throw ParseError("cascade: tree child must follow its parent (" + nwhere + ")");
                    return target;
                };
                tn.left = branch("left_val", "left_node");
                tn.right = branch("right_val", "right_node");
                wc.nodes.push_back(tn);
            }
            stage.classifiers.push_back(std::move(wc));
        }
        c.stages.push_back(std::move(stage));
    }
    return c;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::size_t Cascade::classifier_count() const {
    std::size_t n = 0;
    for (const auto& s : stages) n += s.classifiers.size();
    return n;
}

Cascade parse_cascade(std::string_view xml) {
    if (xml.find_first_not_of(" \t\r\n") == std::string_view::npos) throw ParseError("cascade: empty input");
    pt::ptree doc;
    try {
        std::istringstream in{std::string(xml)};
        pt::read_xml(in, doc, pt::xml_parser::no_comments | pt::xml_parser::trim_whitespace);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError("cascade: malformed XML at line " + std::to_string(e.line()) + ": " + e.message());
    }
    auto storage = doc.find("opencv_storage");
    if (storage == doc.not_found()) throw ParseError("cascade: missing <opencv_storage> root");

    Cascade c;
    bool found = false;
    for (const auto& [key, node] : storage->second) {
        if (key == "<xmlattr>") continue;
        const std::string type = node.get("<xmlattr>.type_id", "");
        if (key == "cascade" && (type.empty() || type == "opencv-cascade-classifier")) {
            c = parse_flat(node);
        } else if (type == "opencv-haar-classifier") {
            c = parse_legacy(node);
        } else {
            continue;
        }
        found = true;
        break;
    }
    if (!found) throw ParseError("cascade: no <cascade> or opencv-haar-classifier element");
    validate(c);
    return c;
}

Cascade load_cascade(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open cascade '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_cascade(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string dump_cascade(const Cascade& c) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\"?>\n<opencv_storage>\n<cascade type_id=\"opencv-cascade-classifier\">\n";
    out << "  <stageType>BOOST</stageType>\n  <featureType>HAAR</featureType>\n";
    out << "  <height>" << c.window_height << "</height>\n  <width>" << c.window_width << "</width>\n";
    out << "  <stageNum>" << c.stages.size() << "</stageNum>\n  <stages>\n";
    for (const auto& s : c.stages) {
        out << "    <_>\n      <maxWeakCount>" << s.classifiers.size() << "</maxWeakCount>\n";
        out << "      <stageThreshold>" << fmt_double(s.threshold) << "</stageThreshold>\n      <weakClassifiers>\n";
        for (const auto& wc : s.classifiers) {
            out << "        <_>\n          <internalNodes>";
            for (const auto& n : wc.nodes) {
                out << ' ' << n.left << ' ' << n.right << ' ' << n.feature << ' ' << fmt_double(n.threshold);
            }
            out << "</internalNodes>\n          <leafValues>";
            for (double v : wc.leaves) out << ' ' << fmt_double(v);
            out << "</leafValues></_>\n";
        }
        out << "      </weakClassifiers></_>\n";
    }
    out << "  </stages>\n  <features>\n";
    for (const auto& f : c.features) {
        out << "    <_>\n      <rects>\n";
        for (const auto& r : f.rects) {
            out << "        <_>" << r.x << ' ' << r.y << ' ' << r.w << ' ' << r.h << ' ' << fmt_double(r.weight) << "</_>\n";
        }
        out << "      </rects>\n      <tilted>" << (f.tilted ? 1 : 0) << "</tilted></_>\n";
    }
    out << "  </features>\n</cascade>\n</opencv_storage>\n";
    return out.str();
}

}  // namespace skintone
