#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

// Network shape notation: "<H>x<W>(-<n>c<k>|-<s>s)*-<n>o", e.g.
// "28x28-12c5-2s-64c5-2s-10o" — a 28x28 input, 12 feature maps from 5x5
// kernels, 2x2 subsampling, 64 maps from 5x5 kernels, 2x2 subsampling, and a
// fully connected 10-unit output. Convolutions are valid-mode (out = in-k+1)
// and connect every input map to every output map; subsampling windows must
// tile the map evenly.

namespace spinsnn {

struct TopologyLayer {
  enum class Kind { Conv, Subsample, Output };
  Kind kind = Kind::Output;
  int units = 0;   // conv: output maps; output: class count; subsample: unused
  int window = 0;  // conv: kernel size; subsample: window; output: unused
};

struct LayerShape {
  int maps = 0;
  int h = 0;
  int w = 0;
  int size() const { return maps * h * w; }
};

class NetworkTopology {
 public:
  static NetworkTopology parse(const std::string& text) {
    NetworkTopology topo;
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : text) {
      if (c == '-') {
        tokens.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    tokens.push_back(cur);
    if (tokens.size() < 2)
      throw std::invalid_argument("topology '" + text + "': need an input and an output layer");

    // Input token: <H>x<W>.
    const std::string& in = tokens.front();
    const auto xpos = in.find('x');
    if (xpos == std::string::npos)
      throw std::invalid_argument("topology: input token '" + in + "' is not <H>x<W>");
    topo.input_h_ = parse_int(in.substr(0, xpos), in);
    topo.input_w_ = parse_int(in.substr(xpos + 1), in);

    for (std::size_t i = 1; i < tokens.size(); ++i) {
      const std::string& tok = tokens[i];
      if (tok.empty()) throw std::invalid_argument("topology: empty layer token");
      const char tag = tok.back();
      TopologyLayer layer;
      if (tag == 'o') {
        layer.kind = TopologyLayer::Kind::Output;
        layer.units = parse_int(tok.substr(0, tok.size() - 1), tok);
        if (i + 1 != tokens.size())
          throw std::invalid_argument("topology: output layer '" + tok + "' must be last");
      } else if (tag == 's') {
        layer.kind = TopologyLayer::Kind::Subsample;
        layer.window = parse_int(tok.substr(0, tok.size() - 1), tok);
      } else if (tag == 'c' || tok.find('c') != std::string::npos) {
        const auto cpos = tok.find('c');
        if (cpos == std::string::npos || cpos + 1 >= tok.size())
          throw std::invalid_argument("topology: layer token '" + tok + "' not recognized");
        layer.kind = TopologyLayer::Kind::Conv;
        layer.units = parse_int(tok.substr(0, cpos), tok);
        layer.window = parse_int(tok.substr(cpos + 1), tok);
      } else {
        throw std::invalid_argument("topology: layer token '" + tok + "' not recognized");
      }
      topo.layers_.push_back(layer);
    }
    if (topo.layers_.back().kind != TopologyLayer::Kind::Output)
      throw std::invalid_argument("topology '" + text + "': last layer must be <n>o");
    topo.shapes();  // validate dimension compatibility up front
    return topo;
  }

  int input_h() const { return input_h_; }
  int input_w() const { return input_w_; }
  const std::vector<TopologyLayer>& layers() const { return layers_; }

  // Output shape of every layer in order, starting from the input image.
  std::vector<LayerShape> shapes() const {
    std::vector<LayerShape> out;
    LayerShape s{1, input_h_, input_w_};
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const TopologyLayer& l = layers_[i];
      switch (l.kind) {
        case TopologyLayer::Kind::Conv:
          if (l.window > s.h || l.window > s.w)
            throw std::invalid_argument("topology: layer " + std::to_string(i + 1) +
                                        " kernel " + std::to_string(l.window) +
                                        " exceeds its " + std::to_string(s.h) + "x" +
                                        std::to_string(s.w) + " input");
          s = {l.units, s.h - l.window + 1, s.w - l.window + 1};
          break;
        case TopologyLayer::Kind::Subsample:
          if (l.window <= 0 || s.h % l.window != 0 || s.w % l.window != 0)
            throw std::invalid_argument("topology: layer " + std::to_string(i + 1) +
                                        " window " + std::to_string(l.window) +
                                        " does not tile a " + std::to_string(s.h) + "x" +
                                        std::to_string(s.w) + " map");
          s = {s.maps, s.h / l.window, s.w / l.window};
          break;
        case TopologyLayer::Kind::Output:
          s = {l.units, 1, 1};
          break;
      }
      out.push_back(s);
    }
    return out;
  }

  // Weight-matrix shape each trainable layer expects: conv layers read
  // flattened maps_in x k x k patches (rows) into maps_out columns; the output
  // layer reads the flattened previous shape into one column per unit.
  struct WeightShape {
    std::size_t layer_index;  // into layers()
    int rows = 0;
    int cols = 0;
  };
  std::vector<WeightShape> weight_shapes() const {
    std::vector<WeightShape> out;
    LayerShape s{1, input_h_, input_w_};
    const auto all = shapes();
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const TopologyLayer& l = layers_[i];
      if (l.kind == TopologyLayer::Kind::Conv)
        out.push_back({i, s.maps * l.window * l.window, l.units});
      else if (l.kind == TopologyLayer::Kind::Output)
        out.push_back({i, s.size(), l.units});
      s = all[i];
    }
    return out;
  }

  std::string str() const {
    std::string s = std::to_string(input_h_) + "x" + std::to_string(input_w_);
    for (const auto& l : layers_) {
      s += '-';
      if (l.kind == TopologyLayer::Kind::Conv)
        s += std::to_string(l.units) + "c" + std::to_string(l.window);
      else if (l.kind == TopologyLayer::Kind::Subsample)
        s += std::to_string(l.window) + "s";
      else
        s += std::to_string(l.units) + "o";
    }
    return s;
  }

 private:
  static int parse_int(const std::string& field, const std::string& token) {
    if (field.empty())
      throw std::invalid_argument("topology: layer token '" + token + "' missing a count");
    char* end = nullptr;
    const long v = std::strtol(field.c_str(), &end, 10);
    if (end != field.c_str() + field.size() || v <= 0 || v > 1000000)
      throw std::invalid_argument("topology: '" + field + "' in token '" + token +
                                  "' is not a positive integer");
    return static_cast<int>(v);
  }

  int input_h_ = 0;
  int input_w_ = 0;
  std::vector<TopologyLayer> layers_;
};

}  // namespace spinsnn
