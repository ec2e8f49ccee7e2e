#ifndef PPSCAN_ONNX_MODEL_HPP
#define PPSCAN_ONNX_MODEL_HPP

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "ppscan/category.hpp"

// Minimal ONNX support: enough of the protobuf wire format to read and write
// model files, and an interpreter for the small op set a token-id text
// classifier needs (Gather, ReduceMean/Sum/SumSquare, MatMul, Gemm,
// Add/Sub/Mul/Div, Sqrt, Sigmoid, Relu, Identity, Constant). Float tensors are
// held as doubles internally; the file format stores float32.

namespace ppscan::onnx {

struct Tensor {
    enum class Dtype { Float, Int64 };

    Dtype dtype = Dtype::Float;
    std::vector<std::int64_t> shape;
    std::vector<double> f;        // Dtype::Float payload
    std::vector<std::int64_t> i;  // Dtype::Int64 payload

    std::size_t size() const;

    static Tensor floats(std::vector<std::int64_t> shape, std::vector<double> values);
    static Tensor ints(std::vector<std::int64_t> shape, std::vector<std::int64_t> values);
};

struct Attribute {
    // Mirrors AttributeProto.AttributeType for the kinds we use.
    enum class Kind { Float = 1, Int = 2, String = 3, TensorVal = 4, Floats = 6, Ints = 7 };

    std::string name;
    Kind kind = Kind::Int;
    float f = 0.0f;
    std::int64_t i = 0;
    std::string s;
    Tensor t;
    std::vector<float> floats;
    std::vector<std::int64_t> ints;
};

struct Node {
    std::string op_type;
    std::string name;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::vector<Attribute> attributes;

    const Attribute* find_attr(const std::string& attr_name) const;
    std::int64_t int_attr(const std::string& attr_name, std::int64_t fallback) const;
    float float_attr(const std::string& attr_name, float fallback) const;
    std::vector<std::int64_t> ints_attr(const std::string& attr_name) const;
};

// Graph input/output declaration. dims uses -1 for symbolic dimensions.
struct ValueInfo {
    std::string name;
    std::int32_t elem_type = 0;  // TensorProto.DataType: 1=float, 6=int32, 7=int64
    std::vector<std::int64_t> dims;
};

struct Graph {
    std::string name;
    std::vector<Node> nodes;
    std::vector<std::pair<std::string, Tensor>> initializers;
    std::vector<ValueInfo> inputs;
    std::vector<ValueInfo> outputs;
};

struct Model {
    std::int64_t ir_version = 8;
    std::string producer_name = "ppscan";
    std::int64_t opset_version = 17;
    Graph graph;

    static Model parse(const std::string& bytes);
    static Model load(const std::string& path);
    std::string serialize() const;
    void save(const std::string& path) const;
};

// Evaluates the graph in node order (ONNX graphs are topologically sorted).
// Throws BackendFailure on unknown ops, missing tensors, or shape errors.
// Pure function of its arguments, so concurrent calls are safe.
std::map<std::string, Tensor> run(const Graph& graph,
                                  const std::map<std::string, Tensor>& feeds);

}  // namespace ppscan::onnx

namespace ppscan::classify {

// Inference over an external ONNX classifier: token-id sequence in, nine
// scores out. The token->id vocabulary ships alongside the model as JSON:
//   {"version": 1, "unk_id": <int>, "tokens": {"word": <int>, ...}}
// Unknown words map to unk_id; an empty segment is fed as a single unk token.
class ExternalModel {
public:
    static ExternalModel load(const std::string& model_path, const std::string& vocab_path);

    std::array<double, kNumCategories> score_tokens(
        const std::vector<std::string>& tokens) const;

    const std::string& input_name() const { return input_name_; }
    const std::string& output_name() const { return output_name_; }
    const std::string& model_path() const { return model_path_; }
    const std::string& vocab_path() const { return vocab_path_; }

private:
    onnx::Model model_;
    std::unordered_map<std::string, std::int64_t> vocab_;
    std::int64_t unk_id_ = 0;
    std::string input_name_;
    std::string output_name_;
    std::string model_path_;
    std::string vocab_path_;
};

}  // namespace ppscan::classify

#endif
