#include "commands.hpp"

#include "nc/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

namespace {

struct Bound {
  std::string single;
  std::vector<std::string> multi;
  bool flag = false;
  CLI::Option* option = nullptr;
};

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"neural entropy closures for kinetic moment systems"};
  app.require_subcommand(1);
  const auto& specs = ncl::command_specs();
  // per command: key -> bound storage
  std::map<std::string, std::map<std::string, Bound>> bound;
  std::map<std::string, std::string> config_files;
  std::map<std::string, CLI::App*> subs;
  for (const auto& spec : specs) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.help);
    subs[spec.name] = sub;
    sub->add_option("--config", config_files[spec.name], "key=value file; flags override it");
    auto& slots = bound[spec.name];
    for (const auto& o : spec.options) {
      Bound& b = slots[o.key];
      const std::string name = "--" + o.key;
      const std::string help = o.help + (o.default_value.empty() ? "" : " [" + o.default_value + "]");
      if (o.nargs == 0) {
        b.option = sub->add_flag(name, b.flag, help);
      } else if (o.nargs == 1) {
        b.option = sub->add_option(name, b.single, help);
      } else if (o.nargs == 2) {
        b.option = sub->add_option(name, b.multi, help)->expected(2)->allow_extra_args(false);
      } else {
        b.option = sub->add_option(name, b.multi, help)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
      }
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    for (const auto& spec : specs) {
      if (!subs[spec.name]->parsed()) continue;
      nc::Config resolved;
      nc::Config file;
      std::set<std::string> known;
      for (const auto& o : spec.options) known.insert(o.key);
      if (!config_files[spec.name].empty()) {
        file = nc::Config::load(config_files[spec.name]);
        file.require_known(known);
      }
      for (const auto& o : spec.options) {
        const Bound& b = bound[spec.name][o.key];
        std::string value = o.default_value;
        if (file.has(o.key)) value = file.get_string(o.key);
        if (b.option->count() > 0) {
          if (o.nargs == 0) value = b.flag ? "true" : "false";
          else if (o.nargs == 1) value = b.single;
          else if (o.nargs == 2) value = join(b.multi, " ");
          else value = join(b.multi, ";");
        }
        resolved.set(o.key, value);
      }
      return spec.run(resolved);
    }
  } catch (const nc::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nc::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const nc::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
