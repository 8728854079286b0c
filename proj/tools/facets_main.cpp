#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "facets/error.hpp"
#include "common.hpp"

namespace {

void print_usage(std::ostream& os) {
    os << "facets -- piecewise-linear structure toolkit for small ReLU nets\n\n"
          "usage: facets <command> [--config FILE] [key=value ...]\n\n"
          "commands:\n"
          "  train       train an MLP and write weight snapshots\n"
          "  regions     enumerate linear-region cells of a 2-input net\n"
          "  census      count constant-pattern pieces along 1D segments\n"
          "  cluster     k-means facet clustering report\n"
          "  crossmap    affine maps between two nets' facet rows\n"
          "  render      region / layer-zero / dual / gradient SVGs\n"
          "  mnist-prep  subset IDX digit files or synthesize a digit set\n\n"
          "run 'facets <command> --help' for the command's keys.\n"
          "exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure\n";
}

} // namespace

int main(int argc, char** argv) {
    using namespace facets::cli;
    if (argc < 2) {
        print_usage(std::cerr);
        return 1;
    }
    const std::string cmd = argv[1];
    std::vector<std::string> args(argv + 2, argv + argc);
    if (cmd == "--help" || cmd == "-h" || cmd == "help") {
        print_usage(std::cout);
        return 0;
    }
    try {
        if (cmd == "train") return cmd_train(args);
        if (cmd == "regions") return cmd_regions(args);
        if (cmd == "census") return cmd_census(args);
        if (cmd == "cluster") return cmd_cluster(args);
        if (cmd == "crossmap") return cmd_crossmap(args);
        if (cmd == "render") return cmd_render(args);
        if (cmd == "mnist-prep") return cmd_mnist_prep(args);
        std::cerr << "facets: unknown command '" << cmd << "'\n";
        print_usage(std::cerr);
        return 1;
    } catch (const HelpRequested&) {
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "facets " << cmd << ": " << e.what() << "\n";
        return 1;
    } catch (const facets::NumericError& e) {
        std::cerr << "facets " << cmd << ": numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const facets::DataError& e) {
        std::cerr << "facets " << cmd << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "facets " << cmd << ": " << e.what() << "\n";
        return 2;
    }
}
