#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace skintone {

// One weighted rectangle of a Haar feature, in window units.
struct HaarRect {
    int x = 0, y = 0, w = 0, h = 0;
    double weight = 0;
    friend bool operator==(const HaarRect&, const HaarRect&) = default;
};

struct HaarFeature {
    std::vector<HaarRect> rects;  // 2 or 3 entries
    bool tilted = false;
    friend bool operator==(const HaarFeature&, const HaarFeature&) = default;
};

// Decision-tree node. A child value > 0 indexes another node; a value <= 0
// selects leaf -child.
struct TreeNode {
    int feature = 0;
    double threshold = 0;
    int left = 0;
    int right = -1;
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct WeakClassifier {
    std::vector<TreeNode> nodes;
    std::vector<double> leaves;
    friend bool operator==(const WeakClassifier&, const WeakClassifier&) = default;
};

struct Stage {
    double threshold = 0;
    std::vector<WeakClassifier> classifiers;
    friend bool operator==(const Stage&, const Stage&) = default;
};

// Boosted Haar cascade. Windows pass a stage when the summed leaf values are
// >= the stage threshold.
struct Cascade {
    int window_width = 0;
    int window_height = 0;
    std::vector<Stage> stages;
    std::vector<HaarFeature> features;

    std::size_t classifier_count() const;
    friend bool operator==(const Cascade&, const Cascade&) = default;
};

// Parses the OpenCV Haar cascade XML format: the current flat layout
// (<cascade> with <stages>/<features>) and the legacy tree layout
// (type_id="opencv-haar-classifier"). Throws ParseError on malformed input and
// UnsupportedError for non-Haar cascades, tilted features and tree-structured
// stage graphs.
Cascade parse_cascade(std::string_view xml);
Cascade load_cascade(const std::string& path);

// Serializes to the current flat layout; parse_cascade(dump_cascade(c)) == c.
std::string dump_cascade(const Cascade& cascade);

}  // namespace skintone
