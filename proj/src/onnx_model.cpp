#include "ppscan/onnx_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string_view>

#include <nlohmann/json.hpp>

#include "ppscan/errors.hpp"

namespace ppscan::onnx {

std::size_t Tensor::size() const {
    std::size_t n = 1;
    for (auto d : shape) n *= static_cast<std::size_t>(d);
    return n;
}

Tensor Tensor::floats(std::vector<std::int64_t> shape, std::vector<double> values) {
    Tensor t;
    t.dtype = Dtype::Float;
    t.shape = std::move(shape);
    t.f = std::move(values);
    return t;
}

Tensor Tensor::ints(std::vector<std::int64_t> shape, std::vector<std::int64_t> values) {
    Tensor t;
    t.dtype = Dtype::Int64;
    t.shape = std::move(shape);
    t.i = std::move(values);
    return t;
}

const Attribute* Node::find_attr(const std::string& attr_name) const {
    for (const auto& a : attributes)
        if (a.name == attr_name) return &a;
    return nullptr;
}

std::int64_t Node::int_attr(const std::string& attr_name, std::int64_t fallback) const {
    const Attribute* a = find_attr(attr_name);
    return a ? a->i : fallback;
}

float Node::float_attr(const std::string& attr_name, float fallback) const {
    const Attribute* a = find_attr(attr_name);
    return a ? a->f : fallback;
}

std::vector<std::int64_t> Node::ints_attr(const std::string& attr_name) const {
    const Attribute* a = find_attr(attr_name);
    return a ? a->ints : std::vector<std::int64_t>{};
}

// ---------------------------------------------------------------------------
// Protobuf wire format
// ---------------------------------------------------------------------------

namespace {

constexpr int kWireVarint = 0;
constexpr int kWireFixed64 = 1;
constexpr int kWireBytes = 2;
constexpr int kWireFixed32 = 5;

class WireReader {
public:
    WireReader(const char* data, std::size_t size)
        : p_(reinterpret_cast<const std::uint8_t*>(data)), end_(p_ + size) {}

    explicit WireReader(std::string_view bytes) : WireReader(bytes.data(), bytes.size()) {}

    bool done() const { return p_ >= end_; }

    std::uint64_t varint() {
        std::uint64_t v = 0;
        int shift = 0;
        while (true) {
            if (p_ >= end_) throw BackendFailure("truncated varint in model file");
            std::uint8_t b = *p_++;
            if (shift < 64) v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
            if (!(b & 0x80)) return v;
            shift += 7;
            if (shift >= 70) throw BackendFailure("overlong varint in model file");
        }
    }

    std::uint32_t fixed32() {
        if (end_ - p_ < 4) throw BackendFailure("truncated fixed32 in model file");
        std::uint32_t v = 0;
        for (int k = 3; k >= 0; --k) v = (v << 8) | p_[k];
        p_ += 4;
        return v;
    }

    std::uint64_t fixed64() {
        if (end_ - p_ < 8) throw BackendFailure("truncated fixed64 in model file");
        std::uint64_t v = 0;
        for (int k = 7; k >= 0; --k) v = (v << 8) | p_[k];
        p_ += 8;
        return v;
    }

    // Returns {field_number, wire_type}.
    std::pair<int, int> tag() {
        std::uint64_t t = varint();
        return {static_cast<int>(t >> 3), static_cast<int>(t & 7)};
    }

    std::string_view bytes() {
        std::uint64_t len = varint();
        if (len > static_cast<std::uint64_t>(end_ - p_))
            throw BackendFailure("truncated length-delimited field in model file");
        std::string_view out(reinterpret_cast<const char*>(p_), static_cast<std::size_t>(len));
        p_ += len;
        return out;
    }

    void skip(int wire) {
        switch (wire) {
            case kWireVarint: varint(); break;
            case kWireFixed64: fixed64(); break;
            case kWireBytes: bytes(); break;
            case kWireFixed32: fixed32(); break;
            default: throw BackendFailure("unsupported wire type in model file");
        }
    }

private:
    const std::uint8_t* p_;
    const std::uint8_t* end_;
};

void put_varint(std::string& out, std::uint64_t v) {
    while (v >= 0x80) {
        out.push_back(static_cast<char>((v & 0x7f) | 0x80));
        v >>= 7;
    }
    out.push_back(static_cast<char>(v));
}

void put_tag(std::string& out, int field, int wire) {
    put_varint(out, (static_cast<std::uint64_t>(field) << 3) | static_cast<std::uint64_t>(wire));
}

void put_uint(std::string& out, int field, std::uint64_t v) {
    put_tag(out, field, kWireVarint);
    put_varint(out, v);
}

void put_bytes(std::string& out, int field, std::string_view payload) {
    put_tag(out, field, kWireBytes);
    put_varint(out, payload.size());
    out.append(payload.data(), payload.size());
}

void put_f32(std::string& out, int field, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    put_tag(out, field, kWireFixed32);
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((bits >> (8 * k)) & 0xff));
}

void append_f32_le(std::string& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((bits >> (8 * k)) & 0xff));
}

void append_i64_le(std::string& out, std::int64_t v) {
    auto bits = static_cast<std::uint64_t>(v);
    for (int k = 0; k < 8; ++k) out.push_back(static_cast<char>((bits >> (8 * k)) & 0xff));
}

float f32_from_bits(std::uint32_t bits) {
    float v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

double f64_from_bits(std::uint64_t bits) {
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

// TensorProto data types we understand.
constexpr int kDtFloat = 1;
constexpr int kDtInt32 = 6;
constexpr int kDtInt64 = 7;
constexpr int kDtDouble = 11;

Tensor parse_tensor(std::string_view blob, std::string* name_out) {
    WireReader r(blob);
    std::vector<std::int64_t> dims;
    int data_type = kDtFloat;
    std::vector<double> floats;
    std::vector<std::int64_t> ints;
    std::string raw;
    while (!r.done()) {
        auto [field, wire] = r.tag();
        switch (field) {
            case 1:  // dims
                if (wire == kWireBytes) {
                    WireReader packed(r.bytes());
                    while (!packed.done()) dims.push_back(static_cast<std::int64_t>(packed.varint()));
                } else {
                    dims.push_back(static_cast<std::int64_t>(r.varint()));
                }
                break;
            case 2: data_type = static_cast<int>(r.varint()); break;
            case 4:  // float_data
                if (wire == kWireBytes) {
                    WireReader packed(r.bytes());
                    while (!packed.done()) floats.push_back(f32_from_bits(packed.fixed32()));
                } else {
                    floats.push_back(f32_from_bits(r.fixed32()));
                }
                break;
            case 5:  // int32_data
            case 7:  // int64_data
                if (wire == kWireBytes) {
                    WireReader packed(r.bytes());
                    while (!packed.done()) ints.push_back(static_cast<std::int64_t>(packed.varint()));
                } else {
                    ints.push_back(static_cast<std::int64_t>(r.varint()));
                }
                break;
            case 8: *name_out = std::string(r.bytes()); break;
            case 9: raw = std::string(r.bytes()); break;
            case 10:  // double_data
                if (wire == kWireBytes) {
                    WireReader packed(r.bytes());
                    while (!packed.done()) floats.push_back(f64_from_bits(packed.fixed64()));
                } else {
                    floats.push_back(f64_from_bits(r.fixed64()));
                }
                break;
            default: r.skip(wire); break;
        }
    }

    Tensor t;
    t.shape = std::move(dims);
    if (data_type == kDtFloat || data_type == kDtDouble) {
        t.dtype = Tensor::Dtype::Float;
        if (!raw.empty() && floats.empty()) {
            std::size_t width = data_type == kDtFloat ? 4 : 8;
            if (raw.size() % width != 0) throw BackendFailure("tensor raw_data size mismatch");
            floats.reserve(raw.size() / width);
            for (std::size_t off = 0; off < raw.size(); off += width) {
                if (width == 4) {
                    std::uint32_t bits = 0;
                    for (int k = 3; k >= 0; --k)
                        bits = (bits << 8) | static_cast<std::uint8_t>(raw[off + k]);
                    floats.push_back(f32_from_bits(bits));
                } else {
                    std::uint64_t bits = 0;
                    for (int k = 7; k >= 0; --k)
                        bits = (bits << 8) | static_cast<std::uint8_t>(raw[off + k]);
                    floats.push_back(f64_from_bits(bits));
                }
            }
        }
        t.f = std::move(floats);
        if (t.f.size() != t.size()) throw BackendFailure("tensor element count does not match dims");
    } else if (data_type == kDtInt32 || data_type == kDtInt64) {
        t.dtype = Tensor::Dtype::Int64;
        if (!raw.empty() && ints.empty()) {
            std::size_t width = data_type == kDtInt32 ? 4 : 8;
            if (raw.size() % width != 0) throw BackendFailure("tensor raw_data size mismatch");
            ints.reserve(raw.size() / width);
            for (std::size_t off = 0; off < raw.size(); off += width) {
                std::uint64_t bits = 0;
                for (int k = static_cast<int>(width) - 1; k >= 0; --k)
                    bits = (bits << 8) | static_cast<std::uint8_t>(raw[off + k]);
                if (width == 4)
                    ints.push_back(static_cast<std::int32_t>(static_cast<std::uint32_t>(bits)));
                else
                    ints.push_back(static_cast<std::int64_t>(bits));
            }
        }
        t.i = std::move(ints);
        if (t.i.size() != t.size()) throw BackendFailure("tensor element count does not match dims");
    } else {
        throw BackendFailure("unsupported tensor data type " + std::to_string(data_type));
    }
    return t;
}

std::string serialize_tensor(const std::string& name, const Tensor& t) {
    std::string out;
    for (auto d : t.shape) put_uint(out, 1, static_cast<std::uint64_t>(d));
    put_uint(out, 2, t.dtype == Tensor::Dtype::Float ? kDtFloat : kDtInt64);
    if (!name.empty()) put_bytes(out, 8, name);
    std::string raw;
    if (t.dtype == Tensor::Dtype::Float) {
        raw.reserve(t.f.size() * 4);
        for (double v : t.f) append_f32_le(raw, static_cast<float>(v));
    } else {
        raw.reserve(t.i.size() * 8);
        for (std::int64_t v : t.i) append_i64_le(raw, v);
    }
    put_bytes(out, 9, raw);
    return out;
}

Attribute parse_attribute(std::string_view blob) {
    WireReader r(blob);
    Attribute a;
    std::string tensor_name;
    while (!r.done()) {
        auto [field, wire] = r.tag();
        switch (field) {
            case 1: a.name = std::string(r.bytes()); break;
            case 2:
                a.f = f32_from_bits(r.fixed32());
                a.kind = Attribute::Kind::Float;
                break;
            case 3:
                a.i = static_cast<std::int64_t>(r.varint());
                a.kind = Attribute::Kind::Int;
                break;
            case 4:
                a.s = std::string(r.bytes());
                a.kind = Attribute::Kind::String;
                break;
            case 5:
                a.t = parse_tensor(r.bytes(), &tensor_name);
                a.kind = Attribute::Kind::TensorVal;
                break;
            case 7:  // floats
                if (wire == kWireBytes) {
                    WireReader packed(r.bytes());
                    while (!packed.done()) a.floats.push_back(f32_from_bits(packed.fixed32()));
                } else {
                    a.floats.push_back(f32_from_bits(r.fixed32()));
                }
                a.kind = Attribute::Kind::Floats;
                break;
            case 8:  // ints
                if (wire == kWireBytes) {
                    WireReader packed(r.bytes());
                    while (!packed.done())
                        a.ints.push_back(static_cast<std::int64_t>(packed.varint()));
                } else {
                    a.ints.push_back(static_cast<std::int64_t>(r.varint()));
                }
                a.kind = Attribute::Kind::Ints;
                break;
            case 20: a.kind = static_cast<Attribute::Kind>(r.varint()); break;
            default: r.skip(wire); break;
        }
    }
    return a;
}

std::string serialize_attribute(const Attribute& a) {
    std::string out;
    put_bytes(out, 1, a.name);
    switch (a.kind) {
        case Attribute::Kind::Float: put_f32(out, 2, a.f); break;
        case Attribute::Kind::Int: put_uint(out, 3, static_cast<std::uint64_t>(a.i)); break;
        case Attribute::Kind::String: put_bytes(out, 4, a.s); break;
        case Attribute::Kind::TensorVal: put_bytes(out, 5, serialize_tensor("", a.t)); break;
        case Attribute::Kind::Floats:
            for (float v : a.floats) put_f32(out, 7, v);
            break;
        case Attribute::Kind::Ints:
            for (std::int64_t v : a.ints) put_uint(out, 8, static_cast<std::uint64_t>(v));
            break;
    }
    put_uint(out, 20, static_cast<std::uint64_t>(a.kind));
    return out;
}

Node parse_node(std::string_view blob) {
    WireReader r(blob);
    Node n;
    while (!r.done()) {
        auto [field, wire] = r.tag();
        switch (field) {
            case 1: n.inputs.emplace_back(r.bytes()); break;
            case 2: n.outputs.emplace_back(r.bytes()); break;
            case 3: n.name = std::string(r.bytes()); break;
            case 4: n.op_type = std::string(r.bytes()); break;
            case 5: n.attributes.push_back(parse_attribute(r.bytes())); break;
            default: r.skip(wire); break;
        }
    }
    return n;
}

std::string serialize_node(const Node& n) {
    std::string out;
    for (const auto& s : n.inputs) put_bytes(out, 1, s);
    for (const auto& s : n.outputs) put_bytes(out, 2, s);
    if (!n.name.empty()) put_bytes(out, 3, n.name);
    put_bytes(out, 4, n.op_type);
    for (const auto& a : n.attributes) put_bytes(out, 5, serialize_attribute(a));
    return out;
}

ValueInfo parse_value_info(std::string_view blob) {
    ValueInfo v;
    WireReader r(blob);
    while (!r.done()) {
        auto [field, wire] = r.tag();
        if (field == 1) {
            v.name = std::string(r.bytes());
        } else if (field == 2) {  // TypeProto
            WireReader type_r(r.bytes());
            while (!type_r.done()) {
                auto [tf, tw] = type_r.tag();
                if (tf == 1) {  // tensor_type
                    WireReader tt(type_r.bytes());
                    while (!tt.done()) {
                        auto [ttf, ttw] = tt.tag();
                        if (ttf == 1) {
                            v.elem_type = static_cast<std::int32_t>(tt.varint());
                        } else if (ttf == 2) {  // TensorShapeProto
                            WireReader shape_r(tt.bytes());
                            while (!shape_r.done()) {
                                auto [sf, sw] = shape_r.tag();
                                if (sf == 1) {  // Dimension
                                    WireReader dim_r(shape_r.bytes());
                                    std::int64_t dim = -1;
                                    while (!dim_r.done()) {
                                        auto [df, dw] = dim_r.tag();
                                        if (df == 1)
                                            dim = static_cast<std::int64_t>(dim_r.varint());
                                        else
                                            dim_r.skip(dw);  // dim_param: symbolic
                                    }
                                    v.dims.push_back(dim);
                                } else {
                                    shape_r.skip(sw);
                                }
                            }
                        } else {
                            tt.skip(ttw);
                        }
                    }
                } else {
                    type_r.skip(tw);
                }
            }
        } else {
            r.skip(wire);
        }
    }
    return v;
}

std::string serialize_value_info(const ValueInfo& v) {
    std::string shape;
    for (auto d : v.dims) {
        std::string dim;
        if (d >= 0)
            put_uint(dim, 1, static_cast<std::uint64_t>(d));
        else
            put_bytes(dim, 2, "N");
        put_bytes(shape, 1, dim);
    }
    std::string tensor_type;
    put_uint(tensor_type, 1, static_cast<std::uint64_t>(v.elem_type));
    put_bytes(tensor_type, 2, shape);
    std::string type;
    put_bytes(type, 1, tensor_type);
    std::string out;
    put_bytes(out, 1, v.name);
    put_bytes(out, 2, type);
    return out;
}

Graph parse_graph(std::string_view blob) {
    Graph g;
    WireReader r(blob);
    while (!r.done()) {
        auto [field, wire] = r.tag();
        switch (field) {
            case 1: g.nodes.push_back(parse_node(r.bytes())); break;
            case 2: g.name = std::string(r.bytes()); break;
            case 5: {
                std::string name;
                Tensor t = parse_tensor(r.bytes(), &name);
                g.initializers.emplace_back(std::move(name), std::move(t));
                break;
            }
            case 11: g.inputs.push_back(parse_value_info(r.bytes())); break;
            case 12: g.outputs.push_back(parse_value_info(r.bytes())); break;
            default: r.skip(wire); break;
        }
    }
    return g;
}

std::string serialize_graph(const Graph& g) {
    std::string out;
    for (const auto& n : g.nodes) put_bytes(out, 1, serialize_node(n));
    put_bytes(out, 2, g.name.empty() ? "graph" : g.name);
    for (const auto& [name, t] : g.initializers) put_bytes(out, 5, serialize_tensor(name, t));
    for (const auto& v : g.inputs) put_bytes(out, 11, serialize_value_info(v));
    for (const auto& v : g.outputs) put_bytes(out, 12, serialize_value_info(v));
    return out;
}

}  // namespace

Model Model::parse(const std::string& bytes) {
    Model m;
    bool saw_graph = false;
    WireReader r(bytes.data(), bytes.size());
    while (!r.done()) {
        auto [field, wire] = r.tag();
        switch (field) {
            case 1: m.ir_version = static_cast<std::int64_t>(r.varint()); break;
            case 2: m.producer_name = std::string(r.bytes()); break;
            case 7:
                m.graph = parse_graph(r.bytes());
                saw_graph = true;
                break;
            case 8: {  // OperatorSetIdProto
                WireReader op_r(r.bytes());
                while (!op_r.done()) {
                    auto [of, ow] = op_r.tag();
                    if (of == 2)
                        m.opset_version = static_cast<std::int64_t>(op_r.varint());
                    else
                        op_r.skip(ow);
                }
                break;
            }
            default: r.skip(wire); break;
        }
    }
    if (!saw_graph) throw BackendFailure("model file contains no graph");
    return m;
}

Model Model::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BackendFailure("cannot open model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string Model::serialize() const {
    std::string out;
    put_uint(out, 1, static_cast<std::uint64_t>(ir_version));
    put_bytes(out, 2, producer_name);
    put_bytes(out, 7, serialize_graph(graph));
    std::string opset;
    put_bytes(opset, 1, "");  // default domain
    put_uint(opset, 2, static_cast<std::uint64_t>(opset_version));
    put_bytes(out, 8, opset);
    return out;
}

void Model::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw BackendFailure("cannot write model file: " + path);
    std::string bytes = serialize();
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw BackendFailure("failed writing model file: " + path);
}

// ---------------------------------------------------------------------------
// Interpreter
// ---------------------------------------------------------------------------

namespace {

using Env = std::unordered_map<std::string, Tensor>;

const Tensor& lookup(const Env& env, const std::string& name, const Node& node) {
    auto it = env.find(name);
    if (it == env.end())
        throw BackendFailure("node " + node.op_type + " references unknown tensor '" + name + "'");
    return it->second;
}

const Tensor& want_float(const Tensor& t, const Node& node) {
    if (t.dtype != Tensor::Dtype::Float)
        throw BackendFailure(node.op_type + " expects a float tensor");
    return t;
}

std::vector<std::int64_t> normalize_axes(std::vector<std::int64_t> axes, std::size_t rank) {
    if (axes.empty())
        for (std::size_t a = 0; a < rank; ++a) axes.push_back(static_cast<std::int64_t>(a));
    for (auto& a : axes) {
        if (a < 0) a += static_cast<std::int64_t>(rank);
        if (a < 0 || a >= static_cast<std::int64_t>(rank))
            throw BackendFailure("reduce axis out of range");
    }
    std::sort(axes.begin(), axes.end());
    axes.erase(std::unique(axes.begin(), axes.end()), axes.end());
    return axes;
}

enum class ReduceKind { Sum, Mean, SumSquare };

Tensor reduce(const Tensor& x, const Node& node, ReduceKind kind) {
    want_float(x, node);
    std::size_t rank = x.shape.size();
    std::vector<std::int64_t> axes = normalize_axes(node.ints_attr("axes"), rank);
    bool keepdims = node.int_attr("keepdims", 1) != 0;

    std::vector<bool> reduced(rank, false);
    for (auto a : axes) reduced[static_cast<std::size_t>(a)] = true;

    std::vector<std::int64_t> out_shape;
    std::size_t count = 1;
    for (std::size_t d = 0; d < rank; ++d) {
        if (reduced[d]) {
            count *= static_cast<std::size_t>(x.shape[d]);
            if (keepdims) out_shape.push_back(1);
        } else {
            out_shape.push_back(x.shape[d]);
        }
    }

    Tensor out = Tensor::floats(out_shape, {});
    out.f.assign(out.size(), 0.0);

    // Strides of the output index for each non-reduced input axis.
    std::vector<std::size_t> out_stride(rank, 0);
    std::size_t stride = 1;
    for (std::size_t d = rank; d-- > 0;) {
        if (!reduced[d]) {
            out_stride[d] = stride;
            stride *= static_cast<std::size_t>(x.shape[d]);
        }
    }

    std::vector<std::size_t> idx(rank, 0);
    for (std::size_t flat = 0; flat < x.f.size(); ++flat) {
        std::size_t out_flat = 0;
        for (std::size_t d = 0; d < rank; ++d) out_flat += idx[d] * out_stride[d];
        double v = x.f[flat];
        out.f[out_flat] += kind == ReduceKind::SumSquare ? v * v : v;
        for (std::size_t d = rank; d-- > 0;) {
            if (++idx[d] < static_cast<std::size_t>(x.shape[d])) break;
            idx[d] = 0;
        }
    }
    if (kind == ReduceKind::Mean)
        for (double& v : out.f) v /= static_cast<double>(count);
    return out;
}

Tensor broadcast_binary(const Tensor& a, const Tensor& b, const Node& node,
                        double (*fn)(double, double)) {
    want_float(a, node);
    want_float(b, node);
    std::size_t rank = std::max(a.shape.size(), b.shape.size());
    std::vector<std::int64_t> sa(rank, 1), sb(rank, 1), out_shape(rank, 1);
    std::copy(a.shape.begin(), a.shape.end(), sa.begin() + (rank - a.shape.size()));
    std::copy(b.shape.begin(), b.shape.end(), sb.begin() + (rank - b.shape.size()));
    for (std::size_t d = 0; d < rank; ++d) {
        if (sa[d] != sb[d] && sa[d] != 1 && sb[d] != 1)
            throw BackendFailure(node.op_type + ": shapes are not broadcastable");
        out_shape[d] = std::max(sa[d], sb[d]);
    }

    std::vector<std::size_t> stride_a(rank, 0), stride_b(rank, 0);
    std::size_t acc_a = 1, acc_b = 1;
    for (std::size_t d = rank; d-- > 0;) {
        stride_a[d] = sa[d] == 1 ? 0 : acc_a;
        stride_b[d] = sb[d] == 1 ? 0 : acc_b;
        acc_a *= static_cast<std::size_t>(sa[d]);
        acc_b *= static_cast<std::size_t>(sb[d]);
    }

    Tensor out = Tensor::floats(out_shape, {});
    out.f.resize(out.size());
    std::vector<std::size_t> idx(rank, 0);
    for (std::size_t flat = 0; flat < out.f.size(); ++flat) {
        std::size_t off_a = 0, off_b = 0;
        for (std::size_t d = 0; d < rank; ++d) {
            off_a += idx[d] * stride_a[d];
            off_b += idx[d] * stride_b[d];
        }
        out.f[flat] = fn(a.f[off_a], b.f[off_b]);
        for (std::size_t d = rank; d-- > 0;) {
            if (++idx[d] < static_cast<std::size_t>(out_shape[d])) break;
            idx[d] = 0;
        }
    }
    return out;
}

Tensor unary(const Tensor& x, const Node& node, double (*fn)(double)) {
    want_float(x, node);
    Tensor out = x;
    for (double& v : out.f) v = fn(v);
    return out;
}

Tensor gather(const Tensor& data, const Tensor& indices, const Node& node) {
    if (node.int_attr("axis", 0) != 0) throw BackendFailure("Gather: only axis 0 is supported");
    if (indices.dtype != Tensor::Dtype::Int64)
        throw BackendFailure("Gather expects integer indices");
    if (data.shape.empty()) throw BackendFailure("Gather expects data rank >= 1");

    std::size_t n_rows = static_cast<std::size_t>(data.shape[0]);
    std::size_t inner = 1;
    for (std::size_t d = 1; d < data.shape.size(); ++d)
        inner *= static_cast<std::size_t>(data.shape[d]);

    Tensor out;
    out.dtype = data.dtype;
    out.shape = indices.shape;
    out.shape.insert(out.shape.end(), data.shape.begin() + 1, data.shape.end());

    for (std::int64_t raw_id : indices.i) {
        std::int64_t id = raw_id < 0 ? raw_id + static_cast<std::int64_t>(n_rows) : raw_id;
        if (id < 0 || id >= static_cast<std::int64_t>(n_rows))
            throw BackendFailure("Gather index out of range");
        std::size_t off = static_cast<std::size_t>(id) * inner;
        if (data.dtype == Tensor::Dtype::Float)
            out.f.insert(out.f.end(), data.f.begin() + off, data.f.begin() + off + inner);
        else
            out.i.insert(out.i.end(), data.i.begin() + off, data.i.begin() + off + inner);
    }
    return out;
}

Tensor matmul(const Tensor& a, const Tensor& b, const Node& node) {
    want_float(a, node);
    want_float(b, node);
    if (a.shape.empty() || a.shape.size() > 2 || b.shape.empty() || b.shape.size() > 2)
        throw BackendFailure("MatMul supports 1-D and 2-D operands only");

    bool a_vec = a.shape.size() == 1;
    bool b_vec = b.shape.size() == 1;
    std::size_t m = a_vec ? 1 : static_cast<std::size_t>(a.shape[0]);
    std::size_t k = static_cast<std::size_t>(a_vec ? a.shape[0] : a.shape[1]);
    std::size_t k2 = static_cast<std::size_t>(b.shape[0]);
    std::size_t n = b_vec ? 1 : static_cast<std::size_t>(b.shape[1]);
    if (k != k2) throw BackendFailure("MatMul: inner dimensions do not match");

    std::vector<double> vals(m * n, 0.0);
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t kk = 0; kk < k; ++kk) {
            double av = a.f[r * k + kk];
            if (av == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) vals[r * n + c] += av * b.f[kk * n + c];
        }

    std::vector<std::int64_t> shape;
    if (!a_vec) shape.push_back(static_cast<std::int64_t>(m));
    if (!b_vec) shape.push_back(static_cast<std::int64_t>(n));
    return Tensor::floats(std::move(shape), std::move(vals));
}

Tensor gemm(const Node& node, const Env& env) {
    const Tensor& a = want_float(lookup(env, node.inputs.at(0), node), node);
    const Tensor& b = want_float(lookup(env, node.inputs.at(1), node), node);
    if (a.shape.size() != 2 || b.shape.size() != 2)
        throw BackendFailure("Gemm expects 2-D operands");

    bool trans_a = node.int_attr("transA", 0) != 0;
    bool trans_b = node.int_attr("transB", 0) != 0;
    double alpha = node.float_attr("alpha", 1.0f);
    double beta = node.float_attr("beta", 1.0f);

    std::size_t m = static_cast<std::size_t>(trans_a ? a.shape[1] : a.shape[0]);
    std::size_t k = static_cast<std::size_t>(trans_a ? a.shape[0] : a.shape[1]);
    std::size_t k2 = static_cast<std::size_t>(trans_b ? b.shape[1] : b.shape[0]);
    std::size_t n = static_cast<std::size_t>(trans_b ? b.shape[0] : b.shape[1]);
    if (k != k2) throw BackendFailure("Gemm: inner dimensions do not match");

    auto at_a = [&](std::size_t r, std::size_t c) {
        return trans_a ? a.f[c * m + r] : a.f[r * k + c];
    };
    auto at_b = [&](std::size_t r, std::size_t c) {
        return trans_b ? b.f[c * k + r] : b.f[r * n + c];
    };

    std::vector<double> vals(m * n, 0.0);
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t kk = 0; kk < k; ++kk) {
            double av = at_a(r, kk);
            if (av == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) vals[r * n + c] += av * at_b(kk, c);
        }
    for (double& v : vals) v *= alpha;

    if (node.inputs.size() > 2 && !node.inputs[2].empty()) {
        const Tensor& cb = want_float(lookup(env, node.inputs[2], node), node);
        std::size_t cm = 1, cn = 1;
        if (cb.shape.size() == 2) {
            cm = static_cast<std::size_t>(cb.shape[0]);
            cn = static_cast<std::size_t>(cb.shape[1]);
        } else if (cb.shape.size() == 1) {
            cn = static_cast<std::size_t>(cb.shape[0]);
        }
        if ((cm != 1 && cm != m) || (cn != 1 && cn != n))
            throw BackendFailure("Gemm: bias is not broadcastable");
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t c = 0; c < n; ++c)
                vals[r * n + c] +=
                    beta * cb.f[(cm == 1 ? 0 : r) * cn + (cn == 1 ? 0 : c)];
    }
    return Tensor::floats({static_cast<std::int64_t>(m), static_cast<std::int64_t>(n)},
                          std::move(vals));
}

double stable_sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

std::map<std::string, Tensor> run(const Graph& graph, const std::map<std::string, Tensor>& feeds) {
    Env env;
    for (const auto& [name, t] : graph.initializers) env.emplace(name, t);
    for (const auto& [name, t] : feeds) env[name] = t;

    for (const auto& node : graph.nodes) {
        if (node.outputs.empty()) throw BackendFailure("node without outputs");
        Tensor result;
        if (node.op_type == "Constant") {
            const Attribute* value = node.find_attr("value");
            if (!value) throw BackendFailure("Constant node lacks a value attribute");
            result = value->t;
        } else if (node.op_type == "Identity") {
            result = lookup(env, node.inputs.at(0), node);
        } else if (node.op_type == "Gather") {
            result = gather(lookup(env, node.inputs.at(0), node),
                            lookup(env, node.inputs.at(1), node), node);
        } else if (node.op_type == "ReduceMean" || node.op_type == "ReduceSum" ||
                   node.op_type == "ReduceSumSquare") {
            ReduceKind kind = node.op_type == "ReduceMean"      ? ReduceKind::Mean
                              : node.op_type == "ReduceSum"     ? ReduceKind::Sum
                                                                : ReduceKind::SumSquare;
            result = reduce(lookup(env, node.inputs.at(0), node), node, kind);
        } else if (node.op_type == "MatMul") {
            result = matmul(lookup(env, node.inputs.at(0), node),
                            lookup(env, node.inputs.at(1), node), node);
        } else if (node.op_type == "Gemm") {
            result = gemm(node, env);
        } else if (node.op_type == "Add") {
            result = broadcast_binary(lookup(env, node.inputs.at(0), node),
                                      lookup(env, node.inputs.at(1), node), node,
                                      [](double x, double y) { return x + y; });
        } else if (node.op_type == "Sub") {
            result = broadcast_binary(lookup(env, node.inputs.at(0), node),
                                      lookup(env, node.inputs.at(1), node), node,
                                      [](double x, double y) { return x - y; });
        } else if (node.op_type == "Mul") {
            result = broadcast_binary(lookup(env, node.inputs.at(0), node),
                                      lookup(env, node.inputs.at(1), node), node,
                                      [](double x, double y) { return x * y; });
        } else if (node.op_type == "Div") {
            result = broadcast_binary(lookup(env, node.inputs.at(0), node),
                                      lookup(env, node.inputs.at(1), node), node,
                                      [](double x, double y) { return x / y; });
        } else if (node.op_type == "Sqrt") {
            result = unary(lookup(env, node.inputs.at(0), node), node,
                           [](double x) { return std::sqrt(x); });
        } else if (node.op_type == "Sigmoid") {
            result = unary(lookup(env, node.inputs.at(0), node), node, stable_sigmoid);
        } else if (node.op_type == "Relu") {
            result = unary(lookup(env, node.inputs.at(0), node), node,
                           [](double x) { return x > 0.0 ? x : 0.0; });
        } else {
            throw BackendFailure("unsupported op type: " + node.op_type);
        }
        env[node.outputs[0]] = std::move(result);
    }

    std::map<std::string, Tensor> outputs;
    for (const auto& vi : graph.outputs) {
        auto it = env.find(vi.name);
        if (it == env.end())
            throw BackendFailure("graph output '" + vi.name + "' was never produced");
        outputs.emplace(vi.name, it->second);
    }
    return outputs;
}

}  // namespace ppscan::onnx

// ---------------------------------------------------------------------------
// External classifier backend
// ---------------------------------------------------------------------------

namespace ppscan::classify {

ExternalModel ExternalModel::load(const std::string& model_path, const std::string& vocab_path) {
    ExternalModel m;
    m.model_ = onnx::Model::load(model_path);
    m.model_path_ = model_path;
    m.vocab_path_ = vocab_path;

    const onnx::Graph& g = m.model_.graph;
    std::unordered_map<std::string, bool> init_names;
    for (const auto& [name, t] : g.initializers) init_names.emplace(name, true);

    std::vector<const onnx::ValueInfo*> data_inputs;
    for (const auto& vi : g.inputs)
        if (!init_names.count(vi.name)) data_inputs.push_back(&vi);
    if (data_inputs.size() != 1)
        throw BadModelSignature("expected exactly one token-id input, found " +
                                std::to_string(data_inputs.size()));
    if (data_inputs[0]->elem_type != 6 && data_inputs[0]->elem_type != 7)
        throw BadModelSignature("token-id input must be int32 or int64");
    m.input_name_ = data_inputs[0]->name;

    if (g.outputs.size() != 1)
        throw BadModelSignature("expected exactly one output tensor, found " +
                                std::to_string(g.outputs.size()));
    const onnx::ValueInfo& out = g.outputs[0];
    if (out.elem_type != 1) throw BadModelSignature("output scores must be float");
    std::int64_t declared = 1;
    for (auto d : out.dims) {
        if (d < 0) throw BadModelSignature("output shape must be static");
        declared *= d;
    }
    if (declared != static_cast<std::int64_t>(kNumCategories))
        throw BadModelSignature("model declares " + std::to_string(declared) +
                                " output scores, expected " + std::to_string(kNumCategories));
    m.output_name_ = out.name;

    std::ifstream in(vocab_path);
    if (!in) throw BackendFailure("cannot open model vocabulary: " + vocab_path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw BackendFailure("model vocabulary is not valid JSON: " + std::string(e.what()));
    }
    if (!doc.is_object() || !doc.contains("tokens") || !doc["tokens"].is_object())
        throw BackendFailure("model vocabulary lacks a \"tokens\" object");
    m.unk_id_ = doc.value("unk_id", 0);
    for (const auto& [token, id] : doc["tokens"].items()) {
        if (!id.is_number_integer())
            throw BackendFailure("model vocabulary id for '" + token + "' is not an integer");
        m.vocab_[token] = id.get<std::int64_t>();
    }
    return m;
}

std::array<double, kNumCategories> ExternalModel::score_tokens(
    const std::vector<std::string>& tokens) const {
    std::vector<std::int64_t> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) {
        auto it = vocab_.find(t);
        ids.push_back(it == vocab_.end() ? unk_id_ : it->second);
    }
    if (ids.empty()) ids.push_back(unk_id_);

    // Take the length before std::move: the arguments are unsequenced.
    const std::int64_t n_ids = static_cast<std::int64_t>(ids.size());
    std::map<std::string, onnx::Tensor> feeds;
    feeds.emplace(input_name_, onnx::Tensor::ints({n_ids}, std::move(ids)));
    auto outputs = onnx::run(model_.graph, feeds);
    const onnx::Tensor& scores = outputs.at(output_name_);
    if (scores.dtype != onnx::Tensor::Dtype::Float || scores.f.size() != kNumCategories)
        throw BackendFailure("external model produced " + std::to_string(scores.f.size()) +
                             " scores, expected " + std::to_string(kNumCategories));

    std::array<double, kNumCategories> out{};
    for (std::size_t c = 0; c < kNumCategories; ++c) {
        if (!std::isfinite(scores.f[c]))
            throw BackendFailure("external model produced a non-finite score");
        out[c] = scores.f[c];
    }
    return out;
}

}  // namespace ppscan::classify
