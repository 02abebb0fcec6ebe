#pragma once

#include <initializer_list>
#include <memory>
#include <sstream>
#include <string>
#include <type_traits>
#include <typeinfo>
#include <utility>
#include <vector>

namespace cogh {

// Fallback describe() for arithmetic payloads and strings.
template <class T, class = std::enable_if_t<std::is_arithmetic_v<T>>>
std::string describe(const T& v) {
  std::ostringstream os;
  os << v;
  return os.str();
}
inline std::string describe(const std::string& s) { return s; }

// Opaque, immutable, equality-comparable value. Every node owns its own belief,
// policy, model and planning-state spaces; the hierarchy engine moves them
// around without knowing their types. Copies share the underlying object.
//
// A stored type T must be copy-constructible, equality-comparable, and have a
// `describe(const T&) -> std::string` overload reachable by ADL (used by the
// debug dump).
class Value {
 public:
  Value() = default;

  template <class T, class D = std::decay_t<T>,
            class = std::enable_if_t<!std::is_same_v<D, Value>>>
  static Value of(T&& v) {
    Value out;
    out.self_ = std::make_shared<const Model<D>>(std::forward<T>(v));
    return out;
  }

  bool empty() const noexcept { return self_ == nullptr; }

  template <class T>
  bool holds() const noexcept {
    return self_ && self_->type() == typeid(T);
  }

  template <class T>
  const T* get_if() const noexcept {
    if (!holds<T>()) return nullptr;
    return &static_cast<const Model<T>&>(*self_).value;
  }

  template <class T>
  const T& as() const {
    if (const T* p = get_if<T>()) return *p;
    throw std::bad_cast();
  }

  std::string str() const { return self_ ? self_->str() : std::string("-"); }

  friend bool operator==(const Value& a, const Value& b) {
    if (a.self_ == b.self_) return true;
    if (!a.self_ || !b.self_) return false;
    return a.self_->type() == b.self_->type() && a.self_->equals(*b.self_);
  }

 private:
  struct Concept {
    virtual ~Concept() = default;
    virtual const std::type_info& type() const noexcept = 0;
    virtual bool equals(const Concept& other) const = 0;
    virtual std::string str() const = 0;
  };

  template <class T>
  struct Model final : Concept {
    template <class U>
    explicit Model(U&& v) : value(std::forward<U>(v)) {}

    const std::type_info& type() const noexcept override { return typeid(T); }
    bool equals(const Concept& other) const override {
      return value == static_cast<const Model&>(other).value;
    }
    std::string str() const override { return describe(value); }

    T value;
  };

  std::shared_ptr<const Concept> self_;
};

// A finite set of values. Insertion order is kept so that dumps are stable;
// equality is set equality.
class ValueSet {
 public:
  ValueSet() = default;
  ValueSet(std::initializer_list<Value> values) {
    for (const auto& v : values) insert(v);
  }

  template <class T>
  static ValueSet single(T&& v) {
    ValueSet s;
    s.insert(Value::of(std::forward<T>(v)));
    return s;
  }

  bool insert(const Value& v) {
    for (const auto& existing : items_)
      if (existing == v) return false;
    items_.push_back(v);
    return true;
  }

  void merge(const ValueSet& other) {
    for (const auto& v : other.items_) insert(v);
  }

  bool empty() const noexcept { return items_.empty(); }
  std::size_t size() const noexcept { return items_.size(); }
  auto begin() const noexcept { return items_.begin(); }
  auto end() const noexcept { return items_.end(); }
  const Value& front() const { return items_.front(); }

  bool contains(const Value& v) const {
    for (const auto& existing : items_)
      if (existing == v) return true;
    return false;
  }

  std::string str() const {
    std::string out = "{";
    for (std::size_t i = 0; i < items_.size(); ++i) {
      if (i) out += ",";
      out += items_[i].str();
    }
    return out + "}";
  }

  friend bool operator==(const ValueSet& a, const ValueSet& b) {
    if (a.size() != b.size()) return false;
    for (const auto& v : a.items_)
      if (!b.contains(v)) return false;
    return true;
  }

 private:
  std::vector<Value> items_;
};

}  // namespace cogh
